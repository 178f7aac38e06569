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

#include "causalx/doc_vectors.h"

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

double LogSigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

std::vector<double> NoiseCdf(const Vocabulary& vocab) {
  std::vector<double> cdf(static_cast<std::size_t>(vocab.size()));
  double total = 0.0;
  for (int i = 0; i < vocab.size(); ++i) {
    const bool special = i == Vocabulary::kPad || i == Vocabulary::kUnk;
    if (!special) total += std::pow(static_cast<double>(vocab.CountAt(i)), 0.75);
    cdf[i] = total;
  }
  return cdf;
}

Vector InitialVector(int dim, Rng& rng) {
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = Uniform(rng, -0.5 / dim, 0.5 / dim);
  return v;
}

// One SGD step on a single (target, negatives) pair. Updates `doc` in place
// and, unless `context` is null, the context rows as well.
void DbowStep(Vector& doc, Matrix* context, const Matrix& frozen, int target,
              std::span<const int> negatives, double lr) {
  const Matrix& u = context ? *context : frozen;
  Vector grad_doc = Vector::Zero(doc.size());
  auto visit = [&](int w, double label) {
    const double s = u.row(w).dot(doc);
    const double g = Sigmoid(s) - label;
    grad_doc += g * u.row(w).transpose();
    if (context) context->row(w) -= lr * g * doc.transpose();
  };
  visit(target, 1.0);
  for (int n : negatives) {
    if (n != target) visit(n, 0.0);
  }
  doc -= lr * grad_doc;
}

}  // namespace

std::vector<int> DocVectorModel::WordIds(
    std::span<const std::string> tokens) const {
  std::vector<int> ids;
  for (const std::string& t : tokens) {
    if (auto id = vocab.Find(t)) {
      if (*id != Vocabulary::kPad && *id != Vocabulary::kUnk) ids.push_back(*id);
    }
  }
  return ids;
}

int DocVectorModel::SampleNoise(Rng& rng) const {
  const double u = Uniform01(rng) * noise_cdf.back();
  const auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u);
  return std::min(static_cast<int>(it - noise_cdf.begin()),
                  static_cast<int>(noise_cdf.size()) - 1);
}

DbowGradients DbowLossAndGrads(const Vector& doc, const Matrix& context,
                               std::span<const int> targets,
                               std::span<const std::vector<int>> negatives) {
  if (negatives.size() != targets.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one negative list per target");
  }
  DbowGradients g;
  g.doc = Vector::Zero(doc.size());
  std::map<int, Vector> rows;
  auto visit = [&](int w, double label) {
    const double s = context.row(w).dot(doc);
    g.loss += label > 0 ? -LogSigmoid(s) : -LogSigmoid(-s);
    const double coeff = Sigmoid(s) - label;
    g.doc += coeff * context.row(w).transpose();
    auto [it, inserted] = rows.try_emplace(w, Vector::Zero(doc.size()));
    it->second += coeff * doc;
  };
  for (std::size_t i = 0; i < targets.size(); ++i) {
    visit(targets[i], 1.0);
    for (int n : negatives[i]) {
      if (n != targets[i]) visit(n, 0.0);
    }
  }
  for (auto& [w, v] : rows) g.context.emplace_back(w, std::move(v));
  return g;
}

DocVectorModel TrainDocVectors(std::span<const std::vector<std::string>> corpus,
                               const DocVectorConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty corpus");
  if (config.dim < 1 || config.neg_samples < 1 || config.epochs < 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad doc-vector configuration");
  }
  DocVectorModel model;
  model.dim = config.dim;
  model.neg_samples = config.neg_samples;
  model.vocab = BuildVocab(corpus, config.min_count, 1, 0);
  model.noise_cdf = NoiseCdf(model.vocab);
  if (model.noise_cdf.back() <= 0.0) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus has no in-vocabulary words");
  }

  Rng rng(config.seed);
  const auto n_docs = static_cast<Eigen::Index>(corpus.size());
  model.doc_vectors.resize(n_docs, config.dim);
  for (Eigen::Index d = 0; d < n_docs; ++d) {
    model.doc_vectors.row(d) = InitialVector(config.dim, rng).transpose();
  }
  model.context_weights = Matrix::Zero(model.vocab.size(), config.dim);

  std::vector<std::vector<int>> ids;
  ids.reserve(corpus.size());
  for (const auto& sentence : corpus) ids.push_back(model.WordIds(sentence));

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const double total =
      static_cast<double>(config.epochs) * static_cast<double>(order.size());
  double step = 0.0;
  std::vector<int> negatives(static_cast<std::size_t>(config.neg_samples));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t d : order) {
      const double lr =
          config.learning_rate * std::max(1e-4, 1.0 - step / total);
      step += 1.0;
      Vector doc = model.doc_vectors.row(static_cast<Eigen::Index>(d));
      for (int target : ids[d]) {
        for (int& n : negatives) n = model.SampleNoise(rng);
        DbowStep(doc, &model.context_weights, model.context_weights, target,
                 negatives, lr);
      }
      model.doc_vectors.row(static_cast<Eigen::Index>(d)) = doc.transpose();
    }
  }
  QuantizeToFloat(&model.doc_vectors);
  QuantizeToFloat(&model.context_weights);
  return model;
}

Vector InferDocVector(const DocVectorModel& model,
                      std::span<const std::string> tokens, int steps,
                      double learning_rate, std::uint64_t seed) {
  Rng rng(seed);
  Vector doc = InitialVector(model.dim, rng);
  const std::vector<int> ids = model.WordIds(tokens);
  std::vector<int> negatives(static_cast<std::size_t>(model.neg_samples));
  for (int s = 0; s < steps; ++s) {
    const double lr =
        learning_rate * std::max(1e-4, 1.0 - static_cast<double>(s) / steps);
    for (int target : ids) {
      for (int& n : negatives) n = model.SampleNoise(rng);
      DbowStep(doc, nullptr, model.context_weights, target, negatives, lr);
    }
  }
  return doc;
}

double CosineSimilarity(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Container ToContainer(const DocVectorModel& model) {
  Container c;
  c.header = json{{"kind", "doc_vectors"},
                  {"dim", model.dim},
                  {"neg_samples", model.neg_samples},
                  {"vocab", model.vocab.ToJson()}};
  c.matrices.push_back({"doc_vectors", model.doc_vectors});
  c.matrices.push_back({"context_weights", model.context_weights});
  return c;
}

DocVectorModel DocVectorsFromContainer(const Container& c) {
  if (c.header.value("kind", "") != "doc_vectors") {
    throw Error(ErrorCode::kFormat, "container is not a doc-vector model");
  }
  DocVectorModel model;
  model.dim = c.header.at("dim").get<int>();
  model.neg_samples = c.header.at("neg_samples").get<int>();
  model.vocab = Vocabulary::FromJson(c.header.at("vocab"));
  model.noise_cdf = NoiseCdf(model.vocab);
  model.doc_vectors = c.Get("doc_vectors");
  model.context_weights = c.Get("context_weights");
  return model;
}

}  // namespace causalx
