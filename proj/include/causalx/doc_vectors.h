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

// Paragraph vectors, distributed bag-of-words variant: each sentence owns a
// vector trained to predict its own tokens against a unigram^0.75 noise
// distribution. Word output vectors are shared across sentences.

#ifndef CAUSALX_DOC_VECTORS_H_
#define CAUSALX_DOC_VECTORS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalx/container.h"
#include "causalx/features.h"
#include "causalx/random.h"

namespace causalx {

struct DocVectorConfig {
  int dim = 50;
  int epochs = 20;
  int neg_samples = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 42;
  int min_count = 1;
};

struct DocVectorModel {
  Vocabulary vocab;
  Matrix doc_vectors;      // one row per training sentence
  Matrix context_weights;  // vocab.size() x dim
  int dim = 0;
  int neg_samples = 5;
  std::vector<double> noise_cdf;  // cumulative unigram^0.75 over vocab ids

  // Vocabulary ids of the in-vocabulary tokens; OOV tokens are dropped.
  std::vector<int> WordIds(std::span<const std::string> tokens) const;
  int SampleNoise(Rng& rng) const;
};

struct DbowGradients {
  double loss = 0.0;
  Vector doc;                                 // d loss / d doc vector
  std::vector<std::pair<int, Vector>> context;  // per distinct touched row
};

// Objective for one sentence: for each target word w with negatives n_k,
// -log s(d.u_w) - sum_k log s(-d.u_{n_k}). negatives[i] belongs to
// targets[i].
DbowGradients DbowLossAndGrads(const Vector& doc, const Matrix& context,
                               std::span<const int> targets,
                               std::span<const std::vector<int>> negatives);

// Throws kEmptyCorpus for an empty corpus. With epochs == 0 the document
// vectors keep their initialization.
DocVectorModel TrainDocVectors(std::span<const std::vector<std::string>> corpus,
                               const DocVectorConfig& config);

// Vector for an unseen sentence: `steps` passes of SGD over its tokens with
// context_weights frozen. steps == 0 returns the seeded initialization.
Vector InferDocVector(const DocVectorModel& model,
                      std::span<const std::string> tokens, int steps,
                      double learning_rate, std::uint64_t seed);

double CosineSimilarity(const Vector& a, const Vector& b);

Container ToContainer(const DocVectorModel& model);
DocVectorModel DocVectorsFromContainer(const Container& container);

}  // namespace causalx

#endif  // CAUSALX_DOC_VECTORS_H_
