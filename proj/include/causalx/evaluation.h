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

// Splits, metrics, the experiment grid and per-task evaluation reports.

#ifndef CAUSALX_EVALUATION_H_
#define CAUSALX_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/container.h"
#include "causalx/datasets.h"
#include "causalx/doc_vectors.h"
#include "causalx/embedding_classifier.h"
#include "causalx/linear_baselines.h"
#include "causalx/sequence_tagger.h"
#include "json.hpp"

namespace causalx {

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  bool stratify_by_label = true;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Per-label seeded shuffle, then round(n * fraction) to train, clamped so
// both sides get at least one item of a label with >= 2 examples.
SplitIndices StratifiedSplit(std::span<const std::string> labels,
                             const SplitSpec& spec);

template <typename T>
std::vector<T> Gather(std::span<const T> items,
                      std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items[i]);
  return out;
}

double F1Binary(std::span<const std::string> predictions,
                std::span<const std::string> gold,
                std::string_view positive_label);
double F1Binary(std::span<const int> predictions, std::span<const int> gold,
                int positive_label = 1);
double Accuracy(std::span<const std::string> predictions,
                std::span<const std::string> gold);
// Unweighted mean of per-label F1 over labels present in either side.
double MacroF1(std::span<const std::string> predictions,
               std::span<const std::string> gold);

struct TokenAccuracyReport {
  double overall = 0.0;
  std::map<int, double> per_class;  // recall; labels without gold omitted
  std::map<int, std::int64_t> support;
};

// Sequences are compared position by position; ragged pairs throw
// kLengthMismatch and zero total positions throw kEmptyInput.
TokenAccuracyReport TokenAndClassAccuracy(
    std::span<const std::vector<int>> predictions,
    std::span<const std::vector<int>> gold);

struct ClassificationReport {
  double f1 = 0.0;  // on the positive label
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t n = 0;
  std::string positive_label;

  nlohmann::json ToJson() const;
};

ClassificationReport Score(std::span<const std::string> predictions,
                           std::span<const std::string> gold,
                           std::string_view positive_label);

// Hypothesis classifier pipeline: tokenize, no stop-word removal.
std::vector<LabeledTokens> HypothesisTrainingData(
    std::span<const TextExample> examples);
ClassificationReport EvaluateHypothesisClassifier(
    const EmbeddingClassifierModel& model,
    std::span<const TextExample> test);

struct GridRow {
  int ngram_order = 1;
  double learning_rate = 0.1;
  int dim = 120;
  double f1_softmax = 0.0;
  double f1_negsample = 0.0;
  double accuracy_softmax = 0.0;
  double accuracy_negsample = 0.0;
};

struct GridReport {
  std::vector<GridRow> rows;

  std::string ToCsv() const;  // ngrams,lr,dim,f1_softmax,f1_negsample
  std::string ToText() const;
  nlohmann::json ToJson() const;
};

// Models 1-4: (1,0.1,120) (2,0.1,120) (5,0.1,120) (1,0.3,120). An n-gram
// order of 5 means every order up to 5.
std::vector<ClassifierConfig> DefaultGrid(std::uint64_t seed = 42);

// Each row is trained with both losses on one shared split; the loss field
// of the row configs is ignored.
GridReport RunGrid(std::span<const TextExample> data,
                   std::span<const ClassifierConfig> grid,
                   const SplitSpec& split = {});

enum class CausalityFeatures { kBow, kDocVec };
std::string_view ToString(CausalityFeatures features);
CausalityFeatures ParseCausalityFeatures(std::string_view s);
LinearKind ParseLinearKind(std::string_view s);  // logistic | svm

inline constexpr int kBowBucketCount = 2000000;

struct CausalityOptions {
  CausalityFeatures features = CausalityFeatures::kBow;
  LinearKind model = LinearKind::kLogistic;
  LinearTrainOptions linear;
  DocVectorConfig doc_vectors;
  int infer_steps = 50;
  std::uint64_t seed = 42;
};

// Masked text, stop words removed.
std::vector<std::string> CausalityTokens(std::string_view masked);

struct CausalityPipeline {
  CausalityOptions options;
  Vocabulary bow_vocab;                // kBow
  std::optional<DocVectorModel> docs;  // kDocVec
  LinearModel linear;

  std::int64_t FeatureDim() const;
  SparseVector Featurize(std::span<const std::string> tokens) const;
  std::string Predict(std::string_view masked) const;
};

// One container holding the linear head plus either the BOW vocabulary or
// the doc-vector model; sub-model matrices are prefixed "linear." and
// "docvec.".
Container ToContainer(const CausalityPipeline& pipeline);
CausalityPipeline CausalityFromContainer(const Container& container);

CausalityPipeline TrainCausality(std::span<const CausalityExample> train,
                                 const CausalityOptions& options);

struct CausalityReport {
  ClassificationReport scores;
  std::string features;
  std::string model;
  std::size_t n_train = 0;
  // Test rows with fewer than three tokens; their BOW vector is zero.
  std::vector<std::string> short_rows;

  nlohmann::json ToJson() const;
};

CausalityReport EvaluateCausality(const CausalityPipeline& pipeline,
                                  std::span<const CausalityExample> test,
                                  std::size_t n_train);

std::vector<TaggedSequence> EncodeTagging(
    std::span<const TaggingExample> examples, const Vocabulary& vocab);
// Words seen fewer than min_count times map to UNK, so the tagger learns an
// embedding for unseen words.
Vocabulary TaggingVocab(std::span<const TaggingExample> train,
                        int min_count = 2);

struct TaggerReport {
  TokenAccuracyReport tokens;
  double cause_span_exact = 0.0;   // fraction of gold cause spans recovered
  double effect_span_exact = 0.0;
  std::size_t n_sequences = 0;

  nlohmann::json ToJson() const;
};

TaggerReport EvaluateTagger(const TaggerModel& model,
                            std::span<const TaggedSequence> test);

}  // namespace causalx

#endif  // CAUSALX_EVALUATION_H_
