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

// Shallow text classifier: token and n-gram embeddings are averaged into a
// sentence embedding which feeds a linear layer over the labels. Trains with
// either a full softmax or negative sampling over labels.

#ifndef CAUSALX_EMBEDDING_CLASSIFIER_H_
#define CAUSALX_EMBEDDING_CLASSIFIER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalx/container.h"
#include "causalx/features.h"
#include "causalx/random.h"
#include "json.hpp"

namespace causalx {

enum class LossKind { kSoftmax, kNegativeSampling };

std::string_view ToString(LossKind loss);
LossKind ParseLossKind(std::string_view s);  // kInvalidArgument if unknown

struct ClassifierConfig {
  int ngram_order = 1;
  double learning_rate = 0.1;
  int dim = 120;
  LossKind loss = LossKind::kSoftmax;
  int epochs = 25;
  int neg_samples = 5;
  std::uint64_t seed = 42;
  int min_count = 1;
  // Hashed rows for n-grams of order >= 2; unused when ngram_order == 1.
  int bucket_count = 100000;

  void Validate() const;  // kInvalidArgument on violations
  nlohmann::json ToJson() const;
  static ClassifierConfig FromJson(const nlohmann::json& j);
};

struct LabeledTokens {
  std::vector<std::string> tokens;
  std::string label;
};

struct EmbeddingClassifierModel {
  Vocabulary vocab;
  Matrix input_embeddings;  // vocab.total_size() x dim
  Matrix output_weights;    // labels.size() x dim
  std::vector<std::string> labels;
  std::vector<std::int64_t> label_counts;
  ClassifierConfig config;

  int dim() const { return static_cast<int>(input_embeddings.cols()); }
  // kUnknownLabel when absent.
  int LabelIndex(std::string_view label) const;
  std::vector<std::int64_t> Features(std::span<const std::string> tokens) const;
};

// Mean of the embedding rows. Summation runs in sorted id order, so the
// result depends only on the multiset of ids. Throws kEmptyInput.
Vector SentenceEmbedding(const EmbeddingClassifierModel& model,
                         std::span<const std::int64_t> ids);

struct Prediction {
  std::string label;
  int label_index = 0;
  std::vector<double> probabilities;  // aligned with model.labels
};

// Softmax over output_weights * embedding; ties go to the earlier label.
Prediction Predict(const EmbeddingClassifierModel& model,
                   std::span<const std::string> tokens);
Prediction PredictIds(const EmbeddingClassifierModel& model,
                      std::span<const std::int64_t> ids);

struct ClassifierGradients {
  double loss = 0.0;
  // Gradient per distinct touched row.
  std::vector<std::pair<std::int64_t, Vector>> input_rows;
  std::vector<std::pair<int, Vector>> output_rows;
};

// Label noise distribution: counts^0.5, excluding the true label. With two
// labels every draw is the opposite label.
std::vector<int> SampleNegatives(const EmbeddingClassifierModel& model,
                                 int true_label, int count, Rng& rng);

// Softmax: cross-entropy over all labels (negatives ignored).
// Negative sampling: -log s(w_y.h) - sum_k log s(-w_k.h) over `negatives`.
ClassifierGradients LossAndGrads(const EmbeddingClassifierModel& model,
                                 std::span<const std::int64_t> ids,
                                 int label_index, LossKind loss,
                                 std::span<const int> negatives);
// Looks the label up (kUnknownLabel) and draws config.neg_samples negatives.
ClassifierGradients LossAndGrads(const EmbeddingClassifierModel& model,
                                 std::span<const std::int64_t> ids,
                                 std::string_view label, LossKind loss,
                                 Rng& rng);

// Seeded SGD with a learning rate decaying linearly to zero. Throws
// kEmptyInput for an empty dataset and kDegenerateDataset for fewer than two
// labels. Parameters are rounded to float32 on completion.
EmbeddingClassifierModel TrainClassifier(std::span<const LabeledTokens> data,
                                         const ClassifierConfig& config);

Container ToContainer(const EmbeddingClassifierModel& model);
EmbeddingClassifierModel ClassifierFromContainer(const Container& container);

}  // namespace causalx

#endif  // CAUSALX_EMBEDDING_CLASSIFIER_H_
