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

#include "causalx/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "causalx/error.h"
#include "causalx/features.h"
#include "causalx/random.h"

namespace causalx {

using nlohmann::json;

namespace {

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " predictions vs " + std::to_string(b) +
                    " gold labels");
  }
}

template <typename T>
double F1Counts(std::span<const T> pred, std::span<const T> gold,
                const T& positive) {
  CheckLengths(pred.size(), gold.size());
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive;
    const bool g = gold[i] == positive;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  const double precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string FormatDouble(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string FormatLr(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

SplitIndices StratifiedSplit(std::span<const std::string> labels,
                             const SplitSpec& spec) {
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "empty dataset");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train_fraction must lie strictly between 0 and 1");
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  if (spec.stratify_by_label) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      groups[labels[i]].push_back(i);
    }
    for (const auto& [label, idx] : groups) {
      if (idx.size() < 2) {
        throw Error(ErrorCode::kStratificationError,
                    "label '" + label + "' has fewer than 2 examples");
      }
    }
  } else {
    auto& all = groups[""];
    for (std::size_t i = 0; i < labels.size(); ++i) all.push_back(i);
  }

  Rng rng(spec.seed);
  SplitIndices out;
  for (auto& [label, idx] : groups) {
    Shuffle(std::span<std::size_t>(idx), rng);
    const std::size_t n = idx.size();
    auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * spec.train_fraction));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

double F1Binary(std::span<const std::string> predictions,
                std::span<const std::string> gold,
                std::string_view positive_label) {
  return F1Counts<std::string>(predictions, gold, std::string(positive_label));
}

double F1Binary(std::span<const int> predictions, std::span<const int> gold,
                int positive_label) {
  return F1Counts<int>(predictions, gold, positive_label);
}

double Accuracy(std::span<const std::string> predictions,
                std::span<const std::string> gold) {
  CheckLengths(predictions.size(), gold.size());
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "no examples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    hits += predictions[i] == gold[i];
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double MacroF1(std::span<const std::string> predictions,
               std::span<const std::string> gold) {
  CheckLengths(predictions.size(), gold.size());
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(predictions.begin(), predictions.end());
  if (labels.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& label : labels) sum += F1Binary(predictions, gold, label);
  return sum / static_cast<double>(labels.size());
}

TokenAccuracyReport TokenAndClassAccuracy(
    std::span<const std::vector<int>> predictions,
    std::span<const std::vector<int>> gold) {
  CheckLengths(predictions.size(), gold.size());
  std::int64_t total = 0, hits = 0;
  std::map<int, std::int64_t> class_hits;
  TokenAccuracyReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    CheckLengths(predictions[s].size(), gold[s].size());
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const int g = gold[s][i];
      ++total;
      ++report.support[g];
      if (predictions[s][i] == g) {
        ++hits;
        ++class_hits[g];
      }
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyInput, "no labeled positions");
  report.overall = static_cast<double>(hits) / static_cast<double>(total);
  for (const auto& [label, n] : report.support) {
    report.per_class[label] =
        static_cast<double>(class_hits[label]) / static_cast<double>(n);
  }
  return report;
}

json ClassificationReport::ToJson() const {
  return json{{"f1", f1},
              {"accuracy", accuracy},
              {"macro_f1", macro_f1},
              {"n", n},
              {"positive_label", positive_label}};
}

ClassificationReport Score(std::span<const std::string> predictions,
                           std::span<const std::string> gold,
                           std::string_view positive_label) {
  ClassificationReport r;
  r.f1 = F1Binary(predictions, gold, positive_label);
  r.accuracy = Accuracy(predictions, gold);
  r.macro_f1 = MacroF1(predictions, gold);
  r.n = gold.size();
  r.positive_label = std::string(positive_label);
  return r;
}

std::vector<LabeledTokens> HypothesisTrainingData(
    std::span<const TextExample> examples) {
  std::vector<LabeledTokens> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    out.push_back(LabeledTokens{TokenizeToStrings(e.text), e.label});
  }
  return out;
}

ClassificationReport EvaluateHypothesisClassifier(
    const EmbeddingClassifierModel& model, std::span<const TextExample> test) {
  std::vector<std::string> pred, gold;
  for (const auto& e : test) {
    const auto tokens = TokenizeToStrings(e.text);
    pred.push_back(tokens.empty() ? model.labels.front()
                                  : Predict(model, tokens).label);
    gold.push_back(e.label);
  }
  return Score(pred, gold, kHypothesisLabel);
}

std::string GridReport::ToCsv() const {
  std::string out = "ngrams,lr,dim,f1_softmax,f1_negsample\n";
  for (const auto& r : rows) {
    out += std::to_string(r.ngram_order) + "," + FormatLr(r.learning_rate) +
           "," + std::to_string(r.dim) + "," + FormatDouble(r.f1_softmax, 4) +
           "," + FormatDouble(r.f1_negsample, 4) + "\n";
  }
  return out;
}

std::string GridReport::ToText() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-7s %-6s %-8s %-10s %-10s %-10s\n",
                "model", "ngrams", "lr", "dim", "f1_softmax", "f1_negsample",
                "acc_negsample");
  os << line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::snprintf(line, sizeof line,
                  "%-7zu %-7d %-6s %-8d %-10.4f %-12.4f %-10.4f\n", i + 1,
                  r.ngram_order, FormatLr(r.learning_rate).c_str(), r.dim,
                  r.f1_softmax, r.f1_negsample, r.accuracy_negsample);
    os << line;
  }
  return os.str();
}

json GridReport::ToJson() const {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back(json{{"ngrams", r.ngram_order},
                       {"lr", r.learning_rate},
                       {"dim", r.dim},
                       {"f1_softmax", r.f1_softmax},
                       {"f1_negsample", r.f1_negsample},
                       {"accuracy_softmax", r.accuracy_softmax},
                       {"accuracy_negsample", r.accuracy_negsample}});
  }
  return json{{"rows", arr}};
}

std::vector<ClassifierConfig> DefaultGrid(std::uint64_t seed) {
  std::vector<ClassifierConfig> grid;
  for (auto [n, lr] : {std::pair{1, 0.1}, std::pair{2, 0.1},
                       std::pair{5, 0.1}, std::pair{1, 0.3}}) {
    ClassifierConfig c;
    c.ngram_order = n;
    c.learning_rate = lr;
    c.dim = 120;
    c.seed = seed;
    grid.push_back(c);
  }
  return grid;
}

GridReport RunGrid(std::span<const TextExample> data,
                   std::span<const ClassifierConfig> grid,
                   const SplitSpec& split) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");
  std::vector<std::string> labels;
  for (const auto& e : data) labels.push_back(e.label);
  const SplitIndices parts = StratifiedSplit(labels, split);
  const auto train = HypothesisTrainingData(Gather(data, parts.train));
  const auto test = Gather(data, parts.test);

  GridReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GridRow row;
    row.ngram_order = grid[i].ngram_order;
    row.learning_rate = grid[i].learning_rate;
    row.dim = grid[i].dim;
    for (LossKind loss : {LossKind::kSoftmax, LossKind::kNegativeSampling}) {
      ClassifierConfig cfg = grid[i];
      cfg.loss = loss;
      try {
        const auto model = TrainClassifier(train, cfg);
        const auto r = EvaluateHypothesisClassifier(model, test);
        if (loss == LossKind::kSoftmax) {
          row.f1_softmax = r.f1;
          row.accuracy_softmax = r.accuracy;
        } else {
          row.f1_negsample = r.f1;
          row.accuracy_negsample = r.accuracy;
        }
      } catch (const Error& e) {
        throw Error(e.code(), "grid row " + std::to_string(i + 1) +
                                  " (ngrams=" + std::to_string(cfg.ngram_order) +
                                  ", lr=" + FormatLr(cfg.learning_rate) +
                                  ", loss=" + std::string(ToString(loss)) +
                                  "): " + e.detail());
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string_view ToString(CausalityFeatures features) {
  return features == CausalityFeatures::kBow ? "bow" : "docvec";
}

CausalityFeatures ParseCausalityFeatures(std::string_view s) {
  if (s == "bow") return CausalityFeatures::kBow;
  if (s == "docvec" || s == "d2v") return CausalityFeatures::kDocVec;
  throw Error(ErrorCode::kInvalidArgument,
              "features must be bow or docvec, got '" + std::string(s) + "'");
}

LinearKind ParseLinearKind(std::string_view s) {
  if (s == "logistic") return LinearKind::kLogistic;
  if (s == "svm" || s == "hinge") return LinearKind::kHinge;
  throw Error(ErrorCode::kInvalidArgument,
              "model must be logistic or svm, got '" + std::string(s) + "'");
}

std::vector<std::string> CausalityTokens(std::string_view masked) {
  const auto tokens = TokenizeToStrings(masked);
  return RemoveStopwords(std::span<const std::string>(tokens));
}

std::int64_t CausalityPipeline::FeatureDim() const {
  if (options.features == CausalityFeatures::kBow) {
    return bow_vocab.total_size();
  }
  return docs ? docs->dim : 0;
}

SparseVector CausalityPipeline::Featurize(
    std::span<const std::string> tokens) const {
  if (options.features == CausalityFeatures::kBow) {
    return BowTrigramVector(tokens, bow_vocab);
  }
  return ToSparse(InferDocVector(*docs, tokens, options.infer_steps,
                                 options.doc_vectors.learning_rate,
                                 options.seed));
}

std::string CausalityPipeline::Predict(std::string_view masked) const {
  const auto p = PredictLinear(linear, Featurize(CausalityTokens(masked)));
  return std::string(p.label == 1 ? kCausalLabel : kAssociativeLabel);
}

CausalityPipeline TrainCausality(std::span<const CausalityExample> train,
                                 const CausalityOptions& options) {
  if (train.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");
  CausalityPipeline pipe;
  pipe.options = options;
  std::vector<std::vector<std::string>> tokens;
  std::vector<int> y;
  for (const auto& e : train) {
    tokens.push_back(CausalityTokens(e.masked));
    y.push_back(e.label == kCausalLabel ? 1 : 0);
  }
  std::vector<SparseVector> x;
  if (options.features == CausalityFeatures::kBow) {
    pipe.bow_vocab = BuildVocab(tokens, 1, 3, kBowBucketCount);
    for (const auto& t : tokens) x.push_back(BowTrigramVector(t, pipe.bow_vocab));
  } else {
    DocVectorConfig dv = options.doc_vectors;
    dv.seed = options.seed;
    pipe.docs = TrainDocVectors(tokens, dv);
    // Training rows go through the same inference as test rows so both
    // sides of the split see one feature distribution.
    for (const auto& t : tokens) x.push_back(pipe.Featurize(t));
  }
  pipe.linear = options.model == LinearKind::kLogistic
                    ? TrainLogistic(x, y, pipe.FeatureDim(), options.linear)
                    : TrainLinearSvm(x, y, pipe.FeatureDim(), options.linear);
  return pipe;
}

namespace {

void Absorb(const Container& part, std::string_view prefix, Container* into) {
  for (const auto& m : part.matrices) {
    into->matrices.push_back({std::string(prefix) + m.name, m.value});
  }
}

Container Extract(const Container& whole, const json& header,
                  std::string_view prefix) {
  Container part;
  part.header = header;
  for (const auto& m : whole.matrices) {
    if (m.name.starts_with(prefix)) {
      part.matrices.push_back({m.name.substr(prefix.size()), m.value});
    }
  }
  return part;
}

}  // namespace

Container ToContainer(const CausalityPipeline& pipeline) {
  Container c;
  const auto& o = pipeline.options;
  c.header = json{{"kind", "causality_pipeline"},
                  {"features", ToString(o.features)},
                  {"infer_steps", o.infer_steps},
                  {"infer_learning_rate", o.doc_vectors.learning_rate},
                  {"seed", o.seed}};
  Container linear = ToContainer(pipeline.linear);
  c.header["linear"] = linear.header;
  Absorb(linear, "linear.", &c);
  if (o.features == CausalityFeatures::kBow) {
    c.header["vocab"] = pipeline.bow_vocab.ToJson();
  } else {
    Container docs = ToContainer(*pipeline.docs);
    c.header["docvec"] = docs.header;
    Absorb(docs, "docvec.", &c);
  }
  return c;
}

CausalityPipeline CausalityFromContainer(const Container& c) {
  if (c.header.value("kind", "") != "causality_pipeline") {
    throw Error(ErrorCode::kFormat, "container is not a causality pipeline");
  }
  CausalityPipeline p;
  p.options.features =
      ParseCausalityFeatures(c.header.at("features").get<std::string>());
  p.options.infer_steps = c.header.at("infer_steps").get<int>();
  p.options.doc_vectors.learning_rate =
      c.header.at("infer_learning_rate").get<double>();
  p.options.seed = c.header.at("seed").get<std::uint64_t>();
  p.linear = LinearFromContainer(Extract(c, c.header.at("linear"), "linear."));
  p.options.model = p.linear.kind;
  if (p.options.features == CausalityFeatures::kBow) {
    p.bow_vocab = Vocabulary::FromJson(c.header.at("vocab"));
  } else {
    p.docs = DocVectorsFromContainer(Extract(c, c.header.at("docvec"), "docvec."));
  }
  return p;
}

json CausalityReport::ToJson() const {
  json j = scores.ToJson();
  j["features"] = features;
  j["model"] = model;
  j["n_train"] = n_train;
  j["short_rows"] = short_rows;
  return j;
}

CausalityReport EvaluateCausality(const CausalityPipeline& pipeline,
                                  std::span<const CausalityExample> test,
                                  std::size_t n_train) {
  CausalityReport report;
  std::vector<std::string> pred, gold;
  for (const auto& e : test) {
    const auto tokens = CausalityTokens(e.masked);
    if (tokens.size() < 3) {
      report.short_rows.push_back(e.sentence_id.empty() ? e.masked
                                                        : e.sentence_id);
    }
    const auto p = PredictLinear(pipeline.linear, pipeline.Featurize(tokens));
    pred.emplace_back(p.label == 1 ? kCausalLabel : kAssociativeLabel);
    gold.push_back(e.label);
  }
  report.scores = Score(pred, gold, kCausalLabel);
  report.features = std::string(ToString(pipeline.options.features));
  report.model = pipeline.options.model == LinearKind::kLogistic ? "logistic"
                                                                 : "svm";
  report.n_train = n_train;
  return report;
}

Vocabulary TaggingVocab(std::span<const TaggingExample> train,
                        int min_count) {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& e : train) corpus.push_back(e.tokens);
  return BuildVocab(corpus, min_count, 1, 0);
}

std::vector<TaggedSequence> EncodeTagging(
    std::span<const TaggingExample> examples, const Vocabulary& vocab) {
  std::vector<TaggedSequence> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    if (e.tokens.size() != e.labels.size()) {
      throw Error(ErrorCode::kLabelAlignmentError,
                  "tokens and labels differ in length for '" + e.sentence_id +
                      "'");
    }
    TaggedSequence t;
    t.sequence = EncodeSequence(e.tokens, vocab);
    t.labels.assign(e.labels.begin(),
                    e.labels.begin() + t.sequence.length());
    out.push_back(std::move(t));
  }
  return out;
}

json TaggerReport::ToJson() const {
  json per_class = json::object();
  json support = json::object();
  for (const auto& [k, v] : tokens.per_class) {
    per_class[std::to_string(k)] = v;
  }
  for (const auto& [k, v] : tokens.support) support[std::to_string(k)] = v;
  return json{{"token_accuracy", tokens.overall},
              {"per_class_recall", per_class},
              {"support", support},
              {"cause_span_exact_match", cause_span_exact},
              {"effect_span_exact_match", effect_span_exact},
              {"n_sequences", n_sequences}};
}

TaggerReport EvaluateTagger(const TaggerModel& model,
                            std::span<const TaggedSequence> test) {
  std::vector<std::vector<int>> pred, gold;
  std::size_t cause_total = 0, cause_hits = 0;
  std::size_t effect_total = 0, effect_hits = 0;
  for (const auto& t : test) {
    pred.push_back(TagSentence(model, t.sequence));
    gold.push_back(t.labels);
    const EntityPair g = ExtractEntities(gold.back());
    const EntityPair p = ExtractEntities(pred.back());
    if (g.cause) {
      ++cause_total;
      cause_hits += p.cause == g.cause;
    }
    if (g.effect) {
      ++effect_total;
      effect_hits += p.effect == g.effect;
    }
  }
  TaggerReport report;
  report.tokens = TokenAndClassAccuracy(pred, gold);
  report.cause_span_exact =
      cause_total ? static_cast<double>(cause_hits) / cause_total : 0.0;
  report.effect_span_exact =
      effect_total ? static_cast<double>(effect_hits) / effect_total : 0.0;
  report.n_sequences = test.size();
  return report;
}

}  // namespace causalx
