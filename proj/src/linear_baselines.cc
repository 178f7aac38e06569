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

#include "causalx/linear_baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
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

// log(1 + exp(-m)) without overflow.
double LogisticLoss(double m) {
  if (m >= 0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

double Dot(const Vector& w, const SparseVector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i) {
    s += w[x.indices[i]] * x.values[i];
  }
  return s;
}

void CheckInputs(std::span<const SparseVector> x, std::span<const int> y,
                 std::int64_t dim) {
  if (x.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "features and labels differ");
  }
  bool pos = false, neg = false;
  for (int label : y) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
    (label ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error(ErrorCode::kDegenerateDataset, "both classes must be present");
  }
  for (const SparseVector& row : x) {
    if (!row.indices.empty() && row.indices.back() >= dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "feature index " + std::to_string(row.indices.back()) +
                      " >= dim " + std::to_string(dim));
    }
  }
}

template <typename ObjectiveFn>
LinearModel Descend(std::span<const SparseVector> x, std::span<const int> y,
                    std::int64_t dim, const LinearTrainOptions& options,
                    LinearKind kind, ObjectiveFn objective) {
  CheckInputs(x, y, dim);
  // Columns never seen in training keep weight 0 under L2 descent from 0, so
  // the optimization runs over the observed columns only.
  std::map<std::int64_t, std::int64_t> compact;
  for (const SparseVector& row : x) {
    for (std::int64_t index : row.indices) compact.try_emplace(index, 0);
  }
  std::vector<std::int64_t> columns;
  for (auto& [index, slot] : compact) {
    slot = static_cast<std::int64_t>(columns.size());
    columns.push_back(index);
  }
  std::vector<SparseVector> cx;
  cx.reserve(x.size());
  for (const SparseVector& row : x) {
    SparseVector r;
    r.values = row.values;
    for (std::int64_t index : row.indices) r.indices.push_back(compact[index]);
    cx.push_back(std::move(r));
  }
  Vector w = Vector::Zero(static_cast<Eigen::Index>(columns.size()));
  double b = 0.0;
  // A constant-step subgradient method does not settle on the nonsmooth
  // hinge objective, so that kind returns the best iterate visited.
  const bool keep_best = kind == LinearKind::kHinge;
  Vector best_w = w;
  double best_b = b;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    const LinearObjective obj = objective(w, b, cx, y, options.l2);
    if (keep_best && obj.loss < best_loss) {
      best_loss = obj.loss;
      best_w = w;
      best_b = b;
    }
    if (epoch == options.epochs) break;
    w -= options.learning_rate * obj.grad_weights;
    b -= options.learning_rate * obj.grad_bias;
  }
  if (keep_best) {
    w = std::move(best_w);
    b = best_b;
  }
  LinearModel model;
  model.kind = kind;
  model.l2 = options.l2;
  model.weights = Vector::Zero(dim);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    model.weights[columns[c]] = w[static_cast<Eigen::Index>(c)];
  }
  model.bias = b;
  QuantizeToFloat(&model.weights);
  model.bias = static_cast<double>(static_cast<float>(model.bias));
  return model;
}

}  // namespace

std::string_view ToString(LinearKind kind) {
  return kind == LinearKind::kLogistic ? "logistic" : "hinge";
}

LinearObjective LogisticObjective(const Vector& w, double b,
                                  std::span<const SparseVector> x,
                                  std::span<const int> y, double l2) {
  LinearObjective obj;
  obj.grad_weights = l2 * w;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sign = y[i] ? 1.0 : -1.0;
    const double score = Dot(w, x[i]) + b;
    obj.loss += LogisticLoss(sign * score) * inv_n;
    // d/ds log(1 + exp(-sign * s)) = -sign * sigmoid(-sign * s)
    const double g = -sign * Sigmoid(-sign * score) * inv_n;
    for (std::size_t k = 0; k < x[i].indices.size(); ++k) {
      obj.grad_weights[x[i].indices[k]] += g * x[i].values[k];
    }
    obj.grad_bias += g;
  }
  obj.loss += 0.5 * l2 * w.squaredNorm();
  return obj;
}

LinearObjective HingeObjective(const Vector& w, double b,
                               std::span<const SparseVector> x,
                               std::span<const int> y, double l2) {
  LinearObjective obj;
  obj.grad_weights = l2 * w;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sign = y[i] ? 1.0 : -1.0;
    const double margin = sign * (Dot(w, x[i]) + b);
    if (margin < 1.0) {
      obj.loss += (1.0 - margin) * inv_n;
      const double g = -sign * inv_n;
      for (std::size_t k = 0; k < x[i].indices.size(); ++k) {
        obj.grad_weights[x[i].indices[k]] += g * x[i].values[k];
      }
      obj.grad_bias += g;
    }
  }
  obj.loss += 0.5 * l2 * w.squaredNorm();
  return obj;
}

LinearModel TrainLogistic(std::span<const SparseVector> x,
                          std::span<const int> y, std::int64_t dim,
                          const LinearTrainOptions& options) {
  return Descend(x, y, dim, options, LinearKind::kLogistic, LogisticObjective);
}

LinearModel TrainLinearSvm(std::span<const SparseVector> x,
                           std::span<const int> y, std::int64_t dim,
                           const LinearTrainOptions& options) {
  return Descend(x, y, dim, options, LinearKind::kHinge, HingeObjective);
}

SparseVector ToSparse(const Vector& dense) {
  SparseVector v;
  for (Eigen::Index i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(i);
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

std::vector<SparseVector> ToSparse(std::span<const Vector> dense) {
  std::vector<SparseVector> out;
  out.reserve(dense.size());
  for (const Vector& d : dense) out.push_back(ToSparse(d));
  return out;
}

namespace {
LinearPrediction FromScore(const LinearModel& model, double score) {
  LinearPrediction p;
  p.score = score;
  if (model.kind == LinearKind::kLogistic) {
    p.probability = Sigmoid(score);
    p.label = p.probability > 0.5 ? 1 : 0;
  } else {
    p.label = score > 0 ? 1 : 0;
    p.probability = p.label;
  }
  return p;
}
}  // namespace

LinearPrediction PredictLinear(const LinearModel& model,
                               const SparseVector& x) {
  if (!x.indices.empty() && x.indices.back() >= model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature index beyond model dimension");
  }
  return FromScore(model, Dot(model.weights, x) + model.bias);
}

LinearPrediction PredictLinear(const LinearModel& model, const Vector& x) {
  if (x.size() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(model.dim()) + " features, got " +
                    std::to_string(x.size()));
  }
  return FromScore(model, model.weights.dot(x) + model.bias);
}

Container ToContainer(const LinearModel& model) {
  Container c;
  c.header = json{{"kind", "linear"},
                  {"loss", ToString(model.kind)},
                  {"l2", model.l2}};
  Matrix w = Eigen::Map<const Matrix>(model.weights.data(), 1, model.dim());
  Matrix b(1, 1);
  b(0, 0) = model.bias;
  c.matrices.push_back({"weights", w});
  c.matrices.push_back({"bias", b});
  return c;
}

LinearModel LinearFromContainer(const Container& c) {
  if (c.header.value("kind", "") != "linear") {
    throw Error(ErrorCode::kFormat, "container is not a linear model");
  }
  LinearModel m;
  const std::string loss = c.header.at("loss").get<std::string>();
  m.kind = loss == "logistic" ? LinearKind::kLogistic : LinearKind::kHinge;
  m.l2 = c.header.at("l2").get<double>();
  const Matrix& w = c.Get("weights");
  m.weights = Eigen::Map<const Vector>(w.data(), w.size());
  m.bias = c.Get("bias")(0, 0);
  return m;
}

}  // namespace causalx
