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

#include "causalx/embedding_classifier.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "causalx/error.h"

namespace causalx {

using nlohmann::json;

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double LogSigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

std::vector<double> Softmax(const Vector& scores) {
  std::vector<double> p(static_cast<std::size_t>(scores.size()));
  const double max = scores.maxCoeff();
  double z = 0.0;
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(scores[k] - max);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace

std::string_view ToString(LossKind loss) {
  return loss == LossKind::kSoftmax ? "softmax" : "negative_sampling";
}

LossKind ParseLossKind(std::string_view s) {
  if (s == "softmax") return LossKind::kSoftmax;
  if (s == "negative_sampling" || s == "ns" || s == "negsample") {
    return LossKind::kNegativeSampling;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown loss '" + std::string(s) + "'");
}

void ClassifierConfig::Validate() const {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  if (!(learning_rate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be > 0");
  }
  if (loss == LossKind::kNegativeSampling && neg_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "neg_samples must be >= 1");
  }
  if (ngram_order < 1) {
    throw Error(ErrorCode::kInvalidNgramOrder, "ngram_order must be >= 1");
  }
  if (epochs < 0) throw Error(ErrorCode::kInvalidArgument, "epochs < 0");
}

json ClassifierConfig::ToJson() const {
  return json{{"ngram_order", ngram_order},   {"learning_rate", learning_rate},
              {"dim", dim},                   {"loss", ToString(loss)},
              {"epochs", epochs},             {"neg_samples", neg_samples},
              {"seed", seed},                 {"min_count", min_count},
              {"bucket_count", bucket_count}};
}

ClassifierConfig ClassifierConfig::FromJson(const json& j) {
  ClassifierConfig c;
  try {
    c.ngram_order = j.at("ngram_order").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.dim = j.at("dim").get<int>();
    c.loss = ParseLossKind(j.at("loss").get<std::string>());
    c.epochs = j.at("epochs").get<int>();
    c.neg_samples = j.at("neg_samples").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.min_count = j.at("min_count").get<int>();
    c.bucket_count = j.at("bucket_count").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad config: ") + e.what());
  }
  return c;
}

int EmbeddingClassifierModel::LabelIndex(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw Error(ErrorCode::kUnknownLabel,
                "label '" + std::string(label) + "' not in model");
  }
  return static_cast<int>(it - labels.begin());
}

std::vector<std::int64_t> EmbeddingClassifierModel::Features(
    std::span<const std::string> tokens) const {
  return FeatureIds(vocab, tokens);
}

Vector SentenceEmbedding(const EmbeddingClassifierModel& model,
                         std::span<const std::int64_t> ids) {
  if (ids.empty()) throw Error(ErrorCode::kEmptyInput, "no feature ids");
  std::vector<std::int64_t> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  Vector h = Vector::Zero(model.dim());
  for (std::int64_t id : sorted) {
    if (id < 0 || id >= model.input_embeddings.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "feature id " + std::to_string(id) + " out of range");
    }
    h += model.input_embeddings.row(id).transpose();
  }
  h /= static_cast<double>(sorted.size());
  return h;
}

Prediction PredictIds(const EmbeddingClassifierModel& model,
                      std::span<const std::int64_t> ids) {
  const Vector h = SentenceEmbedding(model, ids);
  const Vector scores = model.output_weights * h;
  Prediction p;
  p.probabilities = Softmax(scores);
  p.label_index = static_cast<int>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) -
      p.probabilities.begin());
  p.label = model.labels[p.label_index];
  return p;
}

Prediction Predict(const EmbeddingClassifierModel& model,
                   std::span<const std::string> tokens) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "empty sentence");
  const std::vector<std::int64_t> ids = model.Features(tokens);
  return PredictIds(model, ids);
}

std::vector<int> SampleNegatives(const EmbeddingClassifierModel& model,
                                 int true_label, int count, Rng& rng) {
  const int n_labels = static_cast<int>(model.labels.size());
  std::vector<int> out;
  if (n_labels < 2) return out;
  std::vector<double> cdf;
  double total = 0.0;
  for (int k = 0; k < n_labels; ++k) {
    const double c = k < static_cast<int>(model.label_counts.size())
                         ? static_cast<double>(model.label_counts[k])
                         : 1.0;
    total += k == true_label ? 0.0 : std::sqrt(std::max(c, 1.0));
    cdf.push_back(total);
  }
  for (int i = 0; i < count; ++i) {
    const double u = Uniform01(rng) * total;
    int k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                             cdf.begin());
    k = std::min(k, n_labels - 1);
    // Guard for u landing exactly on the true label's zero-width interval.
    if (k == true_label) k = (k + 1) % n_labels;
    out.push_back(k);
  }
  return out;
}

ClassifierGradients LossAndGrads(const EmbeddingClassifierModel& model,
                                 std::span<const std::int64_t> ids,
                                 int label_index, LossKind loss,
                                 std::span<const int> negatives) {
  const int n_labels = static_cast<int>(model.labels.size());
  if (label_index < 0 || label_index >= n_labels) {
    throw Error(ErrorCode::kUnknownLabel,
                "label index " + std::to_string(label_index));
  }
  const Vector h = SentenceEmbedding(model, ids);
  ClassifierGradients g;
  Vector grad_h = Vector::Zero(model.dim());
  std::map<int, Vector> out_rows;
  auto add_output = [&](int k, double coeff) {
    auto [it, inserted] = out_rows.try_emplace(k, Vector::Zero(model.dim()));
    it->second += coeff * h;
    grad_h += coeff * model.output_weights.row(k).transpose();
  };
  if (loss == LossKind::kSoftmax) {
    const Vector scores = model.output_weights * h;
    const std::vector<double> p = Softmax(scores);
    g.loss = -std::log(std::max(p[label_index], 1e-300));
    for (int k = 0; k < n_labels; ++k) {
      add_output(k, p[k] - (k == label_index ? 1.0 : 0.0));
    }
  } else {
    const double s_true = model.output_weights.row(label_index).dot(h);
    g.loss = -LogSigmoid(s_true);
    add_output(label_index, Sigmoid(s_true) - 1.0);
    for (int k : negatives) {
      if (k < 0 || k >= n_labels) {
        throw Error(ErrorCode::kUnknownLabel,
                    "negative label index " + std::to_string(k));
      }
      const double s = model.output_weights.row(k).dot(h);
      g.loss += -LogSigmoid(-s);
      add_output(k, Sigmoid(s));
    }
  }
  for (auto& [k, v] : out_rows) g.output_rows.emplace_back(k, std::move(v));

  std::map<std::int64_t, int> multiplicity;
  for (std::int64_t id : ids) ++multiplicity[id];
  const double inv_n = 1.0 / static_cast<double>(ids.size());
  for (const auto& [id, m] : multiplicity) {
    g.input_rows.emplace_back(id, grad_h * (m * inv_n));
  }
  return g;
}

ClassifierGradients LossAndGrads(const EmbeddingClassifierModel& model,
                                 std::span<const std::int64_t> ids,
                                 std::string_view label, LossKind loss,
                                 Rng& rng) {
  const int k = model.LabelIndex(label);
  std::vector<int> negatives;
  if (loss == LossKind::kNegativeSampling) {
    negatives = SampleNegatives(model, k, model.config.neg_samples, rng);
  }
  return LossAndGrads(model, ids, k, loss, negatives);
}

EmbeddingClassifierModel TrainClassifier(std::span<const LabeledTokens> data,
                                         const ClassifierConfig& config) {
  config.Validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "empty dataset");

  std::map<std::string, std::int64_t> label_freq;
  for (const LabeledTokens& ex : data) ++label_freq[ex.label];
  if (label_freq.size() < 2) {
    throw Error(ErrorCode::kDegenerateDataset,
                "training needs at least two distinct labels");
  }

  EmbeddingClassifierModel model;
  model.config = config;
  for (const auto& [label, count] : label_freq) {
    model.labels.push_back(label);
    model.label_counts.push_back(count);
  }
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(data.size());
  for (const LabeledTokens& ex : data) corpus.push_back(ex.tokens);
  model.vocab = BuildVocab(corpus, config.min_count, config.ngram_order,
                           config.ngram_order > 1 ? config.bucket_count : 0);

  Rng rng(config.seed);
  const double bound = 1.0 / (2.0 * config.dim);
  model.input_embeddings.resize(model.vocab.total_size(), config.dim);
  double* data_ptr = model.input_embeddings.data();
  for (Eigen::Index i = 0; i < model.input_embeddings.size(); ++i) {
    data_ptr[i] = Uniform(rng, -bound, bound);
  }
  model.output_weights =
      Matrix::Zero(static_cast<Eigen::Index>(model.labels.size()), config.dim);

  struct Prepared {
    std::vector<std::int64_t> ids;
    int label;
  };
  std::vector<Prepared> examples;
  for (const LabeledTokens& ex : data) {
    Prepared p{model.Features(ex.tokens), model.LabelIndex(ex.label)};
    if (!p.ids.empty()) examples.push_back(std::move(p));
  }
  if (examples.empty()) throw Error(ErrorCode::kEmptyInput, "all examples empty");

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const double total_steps =
      static_cast<double>(config.epochs) * static_cast<double>(examples.size());
  double step = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t idx : order) {
      const Prepared& ex = examples[idx];
      const double lr = config.learning_rate * (1.0 - step / total_steps);
      step += 1.0;
      std::vector<int> negatives;
      if (config.loss == LossKind::kNegativeSampling) {
        negatives = SampleNegatives(model, ex.label, config.neg_samples, rng);
      }
      const ClassifierGradients g =
          LossAndGrads(model, ex.ids, ex.label, config.loss, negatives);
      for (const auto& [k, v] : g.output_rows) {
        model.output_weights.row(k) -= lr * v.transpose();
      }
      for (const auto& [id, v] : g.input_rows) {
        model.input_embeddings.row(id) -= lr * v.transpose();
      }
    }
  }
  QuantizeToFloat(&model.input_embeddings);
  QuantizeToFloat(&model.output_weights);
  return model;
}

Container ToContainer(const EmbeddingClassifierModel& model) {
  Container c;
  c.header = json{{"kind", "embedding_classifier"},
                  {"config", model.config.ToJson()},
                  {"labels", model.labels},
                  {"label_counts", model.label_counts},
                  {"vocab", model.vocab.ToJson()}};
  c.matrices.push_back({"input_embeddings", model.input_embeddings});
  c.matrices.push_back({"output_weights", model.output_weights});
  return c;
}

EmbeddingClassifierModel ClassifierFromContainer(const Container& c) {
  if (c.header.value("kind", "") != "embedding_classifier") {
    throw Error(ErrorCode::kFormat, "container is not an embedding classifier");
  }
  EmbeddingClassifierModel model;
  try {
    model.config = ClassifierConfig::FromJson(c.header.at("config"));
    model.labels = c.header.at("labels").get<std::vector<std::string>>();
    model.label_counts =
        c.header.at("label_counts").get<std::vector<std::int64_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad header: ") + e.what());
  }
  model.vocab = Vocabulary::FromJson(c.header.at("vocab"));
  model.input_embeddings = c.Get("input_embeddings");
  model.output_weights = c.Get("output_weights");
  if (model.input_embeddings.rows() != model.vocab.total_size() ||
      model.output_weights.rows() !=
          static_cast<Eigen::Index>(model.labels.size()) ||
      model.output_weights.cols() != model.input_embeddings.cols()) {
    throw Error(ErrorCode::kFormat, "matrix shapes disagree with header");
  }
  return model;
}

}  // namespace causalx
