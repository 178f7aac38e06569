// Copyright 2026 The Causalx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the causalx package.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "causalx/annotation_service.h"
#include "causalx/annotation_store.h"
#include "causalx/cli.h"
#include "causalx/container.h"
#include "causalx/corpus.h"
#include "causalx/datasets.h"
#include "causalx/embedding_classifier.h"
#include "causalx/error.h"
#include "causalx/evaluation.h"
#include "causalx/features.h"
#include "causalx/lime_explainer.h"
#include "causalx/sequence_tagger.h"
#include "causalx/synthetic.h"
#include "json.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace causalx {
namespace {

// Overrides from Python on top of the default configuration.
template <typename Config>
Config WithOverrides(const std::string& overrides) {
  json j = Config{}.ToJson();
  if (!overrides.empty()) j.update(json::parse(overrides));
  Config c = Config::FromJson(j);
  c.Validate();
  return c;
}

std::string CandidatesJson(const std::string& doc_id, const std::string& text) {
  const Document doc = CleanText(LoadDocument(doc_id, text));
  json out = json::array();
  for (const Candidate& c : ExtractCandidates(SegmentSentences(doc))) {
    out.push_back({{"sentence_id", c.sentence.sentence_id},
                   {"text", c.sentence.text},
                   {"marker", c.marker},
                   {"marker_span", {c.marker_span.begin, c.marker_span.end}}});
  }
  return out.dump();
}

class PyClassifier {
 public:
  explicit PyClassifier(EmbeddingClassifierModel model)
      : model_(std::move(model)) {}

  static PyClassifier Train(const std::string& corpus_jsonl,
                            const std::string& config_json) {
    const LabeledCorpus c = ParseJsonl(corpus_jsonl);
    const auto cfg = WithOverrides<ClassifierConfig>(config_json);
    return PyClassifier(TrainClassifier(HypothesisTrainingData(c.hypothesis), cfg));
  }

  static PyClassifier Load(const std::string& path) {
    return PyClassifier(ClassifierFromContainer(LoadContainer(path)));
  }

  void Save(const std::string& path) const {
    SaveContainer(ToContainer(model_), path);
  }

  std::pair<std::string, std::vector<double>> Predict(
      const std::string& text) const {
    const auto tokens = TokenizeToStrings(text);
    Prediction p = causalx::Predict(model_, tokens);
    return {p.label, p.probabilities};
  }

  std::vector<std::string> Labels() const { return model_.labels; }

  std::string Evaluate(const std::string& corpus_jsonl) const {
    return EvaluateHypothesisClassifier(model_,
                                        ParseJsonl(corpus_jsonl).hypothesis)
        .ToJson()
        .dump();
  }

  std::string Explain(const std::string& sentence, const std::string& label,
                      int n_samples, std::uint64_t seed,
                      bool exhaustive) const {
    const int index = model_.LabelIndex(label);
    ScoreFn score = [&](const std::string& text) {
      const auto tokens = TokenizeToStrings(text);
      return causalx::Predict(model_, tokens).probabilities[index];
    };
    LimeOptions o;
    o.n_samples = n_samples;
    o.seed = seed;
    o.exhaustive = exhaustive;
    o.label = label;
    return ToJson(causalx::Explain(score, std::string_view(sentence), o)).dump();
  }

 private:
  EmbeddingClassifierModel model_;
};

std::string Grid(const std::string& corpus_jsonl, std::uint64_t seed) {
  const LabeledCorpus c = ParseJsonl(corpus_jsonl);
  return RunGrid(c.hypothesis, DefaultGrid(seed), SplitSpec{0.8, seed, true})
      .ToCsv();
}

template <typename T>
std::vector<std::string> LabelsOf(const std::vector<T>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::string CausalityReportJson(const std::string& corpus_jsonl,
                                const std::string& features,
                                const std::string& model, std::uint64_t seed) {
  const auto rows = ParseJsonl(corpus_jsonl).causality;
  const auto idx = StratifiedSplit(LabelsOf(rows), SplitSpec{0.8, seed, true});
  const auto train = Gather<CausalityExample>(rows, idx.train);
  const auto test = Gather<CausalityExample>(rows, idx.test);
  CausalityOptions o;
  o.features = ParseCausalityFeatures(features);
  o.model = ParseLinearKind(model);
  o.seed = seed;
  return EvaluateCausality(TrainCausality(train, o), test, train.size())
      .ToJson()
      .dump();
}

std::pair<std::string, std::string> TaggerReportJson(
    const std::string& corpus_jsonl, const std::string& config_json) {
  const auto rows = ParseJsonl(corpus_jsonl).tagging;
  const auto cfg = WithOverrides<TaggerConfig>(config_json);
  const auto idx = StratifiedSplit(std::vector<std::string>(rows.size()),
                                   SplitSpec{0.8, cfg.seed, false});
  const auto train = Gather<TaggingExample>(rows, idx.train);
  const auto test = Gather<TaggingExample>(rows, idx.test);
  const Vocabulary vocab = TaggingVocab(train);
  const auto test_seq = EncodeTagging(test, vocab);
  const auto trained =
      TrainTagger(vocab, EncodeTagging(train, vocab), test_seq, cfg);
  return {EvaluateTagger(trained.model, test_seq).ToJson().dump(),
          trained.curve.ToCsv()};
}

class PyStore {
 public:
  explicit PyStore(const std::string& path) : store_(path) {}

  std::string Ingest(const std::string& doc_id, const std::string& text) {
    return store_.IngestDocument(doc_id, text).ToJson().dump();
  }
  std::string SubmitLabel(const std::string& id,
                          const std::string& judgment_json) {
    return ToJson(store_.SubmitLabel(
                      id, Judgment::FromJson(json::parse(judgment_json))))
        .dump();
  }
  std::string Records() const {
    json out = json::array();
    for (const auto& r : store_.CurrentRecords()) out.push_back(ToJson(r));
    return out.dump();
  }
  std::string Export(const std::string& kind, const std::string& format,
                     std::uint64_t seed) const {
    return store_.ExportDataset(ParseExportKind(kind), ParseExportFormat(format),
                                seed);
  }
  std::string Stats() const { return ToJson(store_.Stats()).dump(); }
  std::string LogJsonl() const { return store_.LogJsonl(); }
  AnnotationStore* raw() { return &store_; }

 private:
  AnnotationStore store_;
};

class PyApi {
 public:
  PyApi(PyStore& store, std::uint64_t seed) : api_(store.raw(), seed) {}
  std::tuple<int, std::string, std::string> Handle(
      const std::string& method, const std::string& path,
      const std::map<std::string, std::string>& query, const std::string& body) {
    const ApiResponse r = api_.Handle(ApiRequest{method, path, query, body});
    return {r.status, r.content_type, r.body};
  }

 private:
  AnnotationApi api_;
};

}  // namespace
}  // namespace causalx

PYBIND11_MODULE(_causalx, m) {
  using namespace causalx;
  m.doc() = "causal knowledge extraction core";

  static py::exception<Error> error(m, "CausalxError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("tokenize", &TokenizeToStrings, py::arg("text"));
  m.def(
      "mask_nodes",
      [](const std::string& text, std::pair<std::size_t, std::size_t> node1,
         std::pair<std::size_t, std::size_t> node2) {
        return MaskNodes(text, Span{node1.first, node1.second},
                         Span{node2.first, node2.second});
      },
      py::arg("text"), py::arg("node1"), py::arg("node2"));
  m.def("extract_candidates_json", &CandidatesJson, py::arg("doc_id"),
        py::arg("text"));
  m.def(
      "generate_synthetic_jsonl",
      [](std::uint64_t seed, int n) { return ToJsonl(GenerateSynthetic(seed, n)); },
      py::arg("seed"), py::arg("n_per_class"));
  m.def("grid_csv", &Grid, py::arg("corpus_jsonl"), py::arg("seed") = 42);
  m.def("causality_report_json", &CausalityReportJson, py::arg("corpus_jsonl"),
        py::arg("features") = "bow", py::arg("model") = "logistic",
        py::arg("seed") = 42);
  m.def("tagger_report_json", &TaggerReportJson, py::arg("corpus_jsonl"),
        py::arg("config_json") = "");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = RunCli(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

  py::class_<PyClassifier>(m, "Classifier")
      .def_static("train", &PyClassifier::Train, py::arg("corpus_jsonl"),
                  py::arg("config_json") = "")
      .def_static("load", &PyClassifier::Load, py::arg("path"))
      .def("save", &PyClassifier::Save, py::arg("path"))
      .def("predict", &PyClassifier::Predict, py::arg("text"))
      .def_property_readonly("labels", &PyClassifier::Labels)
      .def("evaluate_json", &PyClassifier::Evaluate, py::arg("corpus_jsonl"))
      .def("explain_json", &PyClassifier::Explain, py::arg("sentence"),
           py::arg("label") = "hypothesis", py::arg("n_samples") = 500,
           py::arg("seed") = 42, py::arg("exhaustive") = false);

  py::class_<PyStore>(m, "Store")
      .def(py::init<const std::string&>(), py::arg("path") = "")
      .def("ingest_json", &PyStore::Ingest, py::arg("doc_id"), py::arg("text"))
      .def("submit_label_json", &PyStore::SubmitLabel, py::arg("sentence_id"),
           py::arg("judgment_json"))
      .def("records_json", &PyStore::Records)
      .def("export", &PyStore::Export, py::arg("kind"),
           py::arg("format") = "jsonl", py::arg("seed") = 42)
      .def("stats_json", &PyStore::Stats)
      .def("log_jsonl", &PyStore::LogJsonl);

  py::class_<PyApi>(m, "Api")
      .def(py::init<PyStore&, std::uint64_t>(), py::arg("store"),
           py::arg("seed") = 42, py::keep_alive<1, 2>())
      .def("handle", &PyApi::Handle, py::arg("method"), py::arg("path"),
           py::arg("query") = std::map<std::string, std::string>{},
           py::arg("body") = "");
}
