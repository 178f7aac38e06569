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

// L2-regularized logistic regression and linear SVM trained by full-batch
// (sub)gradient descent over sparse or dense feature vectors.

#ifndef CAUSALX_LINEAR_BASELINES_H_
#define CAUSALX_LINEAR_BASELINES_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "causalx/container.h"
#include "causalx/features.h"

namespace causalx {

enum class LinearKind { kLogistic, kHinge };

std::string_view ToString(LinearKind kind);

struct LinearModel {
  Vector weights;
  double bias = 0.0;
  LinearKind kind = LinearKind::kLogistic;
  double l2 = 0.0;

  std::int64_t dim() const { return weights.size(); }
};

struct LinearTrainOptions {
  double l2 = 1e-4;
  int epochs = 500;
  double learning_rate = 0.5;
};

// Value and gradient of mean loss + (l2 / 2) * |w|^2 (bias unregularized).
// Labels are 0/1; the hinge form maps them to -1/+1 and takes the zero
// subgradient at margin exactly 1.
struct LinearObjective {
  double loss = 0.0;
  Vector grad_weights;
  double grad_bias = 0.0;
};

LinearObjective LogisticObjective(const Vector& w, double b,
                                  std::span<const SparseVector> x,
                                  std::span<const int> y, double l2);
LinearObjective HingeObjective(const Vector& w, double b,
                               std::span<const SparseVector> x,
                               std::span<const int> y, double l2);

// Throws kEmptyInput for no rows, kLengthMismatch when x and y differ in
// length, kDegenerateDataset when only one class is present and
// kDimensionMismatch for indices >= dim.
LinearModel TrainLogistic(std::span<const SparseVector> x,
                          std::span<const int> y, std::int64_t dim,
                          const LinearTrainOptions& options = {});
LinearModel TrainLinearSvm(std::span<const SparseVector> x,
                           std::span<const int> y, std::int64_t dim,
                           const LinearTrainOptions& options = {});

SparseVector ToSparse(const Vector& dense);
std::vector<SparseVector> ToSparse(std::span<const Vector> dense);

struct LinearPrediction {
  int label = 0;
  double score = 0.0;
  // Sigmoid of the score for logistic models; 0 or 1 for hinge models.
  double probability = 0.0;
};

LinearPrediction PredictLinear(const LinearModel& model, const SparseVector& x);
LinearPrediction PredictLinear(const LinearModel& model, const Vector& x);

Container ToContainer(const LinearModel& model);
LinearModel LinearFromContainer(const Container& container);

}  // namespace causalx

#endif  // CAUSALX_LINEAR_BASELINES_H_
