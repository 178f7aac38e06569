# Copyright 2026 The Causalx Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Causal knowledge extraction from scholarly text.

Thin layer over the C++ core; JSON results are decoded into dicts.
"""

import json

from . import _causalx
from ._causalx import CausalxError, tokenize, mask_nodes, run_cli

__all__ = [
    "CausalxError",
    "Classifier",
    "Store",
    "Api",
    "tokenize",
    "mask_nodes",
    "run_cli",
    "extract_candidates",
    "generate_synthetic",
    "run_grid",
    "causality_report",
    "tagger_report",
]


def extract_candidates(text, doc_id="doc"):
    """Clean, segment and return the sentences carrying a hypothesis marker."""
    return json.loads(_causalx.extract_candidates_json(doc_id, text))


def generate_synthetic(seed=42, n_per_class=500):
    """Synthetic labeled corpus as JSONL text."""
    return _causalx.generate_synthetic_jsonl(seed, n_per_class)


def run_grid(corpus_jsonl, seed=42):
    """Four-model grid; returns the CSV text."""
    return _causalx.grid_csv(corpus_jsonl, seed)


def causality_report(corpus_jsonl, features="bow", model="logistic", seed=42):
    return json.loads(
        _causalx.causality_report_json(corpus_jsonl, features, model, seed))


def tagger_report(corpus_jsonl, **config):
    """Train and score the tagger; returns (report, curve_csv)."""
    report, curve = _causalx.tagger_report_json(
        corpus_jsonl, json.dumps(config) if config else "")
    return json.loads(report), curve


class Classifier:
    def __init__(self, core):
        self._core = core

    @classmethod
    def train(cls, corpus_jsonl, **config):
        return cls(_causalx.Classifier.train(
            corpus_jsonl, json.dumps(config) if config else ""))

    @classmethod
    def load(cls, path):
        return cls(_causalx.Classifier.load(path))

    def save(self, path):
        self._core.save(path)

    @property
    def labels(self):
        return self._core.labels

    def predict(self, text):
        """Returns (label, {label: probability})."""
        label, probs = self._core.predict(text)
        return label, dict(zip(self._core.labels, probs))

    def evaluate(self, corpus_jsonl):
        return json.loads(self._core.evaluate_json(corpus_jsonl))

    def explain(self, sentence, label="hypothesis", n_samples=500, seed=42,
                exhaustive=False):
        return json.loads(self._core.explain_json(
            sentence, label, n_samples, seed, exhaustive))


class Store:
    """Annotation store; an empty path keeps it in memory."""

    def __init__(self, path=""):
        self._core = _causalx.Store(path)

    def ingest(self, doc_id, text):
        return json.loads(self._core.ingest_json(doc_id, text))

    def submit_label(self, sentence_id, **judgment):
        return json.loads(
            self._core.submit_label_json(sentence_id, json.dumps(judgment)))

    def records(self):
        return json.loads(self._core.records_json())

    def export(self, kind, format="jsonl", seed=42):
        return self._core.export(kind, format, seed)

    def stats(self):
        return json.loads(self._core.stats_json())

    def log_jsonl(self):
        return self._core.log_jsonl()


class Api:
    """The HTTP request handler without a socket."""

    def __init__(self, store, seed=42):
        self._core = _causalx.Api(store._core, seed)

    def handle(self, method, path, query=None, body=""):
        if not isinstance(body, str):
            body = json.dumps(body)
        return self._core.handle(method, path, query or {}, body)
