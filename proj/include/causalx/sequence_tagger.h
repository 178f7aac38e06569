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

// Bi-directional LSTM token tagger for cause/effect entity extraction.
// Tags: 0 non-entity, 1 cause, 2 effect.

#ifndef CAUSALX_SEQUENCE_TAGGER_H_
#define CAUSALX_SEQUENCE_TAGGER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/container.h"
#include "causalx/features.h"
#include "causalx/span.h"

namespace causalx {

inline constexpr int kTagNone = 0;
inline constexpr int kTagCause = 1;
inline constexpr int kTagEffect = 2;
inline constexpr int kNumTags = 3;

struct TaggerConfig {
  int embed_dim = 32;
  int hidden_units = 3;
  int batch_size = 32;
  int epochs = 60;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  static constexpr int kMaxLen = kMaxSequenceLength;

  void Validate() const;
  nlohmann::json ToJson() const;
  static TaggerConfig FromJson(const nlohmann::json& j);
};

// Gate rows are stacked input, forget, output, candidate.
struct LstmCell {
  Matrix w_input;   // 4H x E
  Matrix w_hidden;  // 4H x H
  Vector bias;      // 4H

  int hidden() const { return static_cast<int>(w_hidden.cols()); }
  int input() const { return static_cast<int>(w_input.cols()); }
};

// Hidden states h_1..h_T from zero initial state. kDimensionMismatch when an
// input does not match the cell's input size.
std::vector<Vector> LstmForward(const LstmCell& cell,
                                std::span<const Vector> inputs);

struct TaggerParameters {
  Matrix token_embeddings;  // vocab x E
  LstmCell forward;
  LstmCell backward;
  Matrix head;       // 3 x 2H
  Vector head_bias;  // 3

  struct Block {
    std::string_view name;
    double* data;
    Eigen::Index size;
  };
  // Every parameter group in a fixed order.
  std::vector<Block> Blocks();
  TaggerParameters ZerosLike() const;
};

struct TaggerModel {
  Vocabulary vocab;
  TaggerParameters params;
  TaggerConfig config;
};

struct TaggedSequence {
  EncodedSequence sequence;
  std::vector<int> labels;  // one per real (mask true) position
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainingCurve {
  std::vector<EpochStats> epochs;
  std::string ToCsv() const;  // epoch,train_accuracy,val_accuracy
};

struct TrainedTagger {
  TaggerModel model;
  TrainingCurve curve;
};

// Real positions of a masked sequence, in order.
std::vector<int> RealPositions(const std::vector<bool>& mask);

// Randomly initialized model (Glorot-uniform weights, forget-gate bias 1).
TaggerModel InitTagger(const Vocabulary& vocab, const TaggerConfig& config);

// Summed cross-entropy over real positions. Padding ids are never read.
// When `grads` is non-null it is accumulated into (shaped like the model).
double SequenceLoss(const TaggerModel& model, std::span<const int> ids,
                    const std::vector<bool>& mask, std::span<const int> gold,
                    TaggerParameters* grads = nullptr);

// Per position argmax, lowest tag on ties; one tag per real position.
std::vector<int> TagSentence(const TaggerModel& model,
                             const EncodedSequence& sequence);

// Mini-batch Adam on the summed masked cross-entropy. The vocabulary must
// cover the ids in `train`. Throws kEmptyInput for an empty training set and
// kLabelAlignmentError when labels do not match the mask.
TrainedTagger TrainTagger(const Vocabulary& vocab,
                          std::span<const TaggedSequence> train,
                          std::span<const TaggedSequence> validation,
                          const TaggerConfig& config);

double MeanLoss(const TaggerModel& model, std::span<const TaggedSequence> data);
double TokenAccuracy(const TaggerModel& model,
                     std::span<const TaggedSequence> data);

struct EntityPair {
  std::optional<Span> cause;   // token index range
  std::optional<Span> effect;

  friend bool operator==(const EntityPair&, const EntityPair&) = default;
};

// Longest maximal run of each tag; the earliest run wins ties.
EntityPair ExtractEntities(std::span<const int> labels);

Container ToContainer(const TaggerModel& model);
TaggerModel TaggerFromContainer(const Container& container);

}  // namespace causalx

#endif  // CAUSALX_SEQUENCE_TAGGER_H_
