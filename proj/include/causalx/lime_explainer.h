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

// Local surrogate explanations: perturb a sentence by dropping words, score
// every variant with a black-box classifier and fit a proximity-weighted
// linear model on word-presence indicators.

#ifndef CAUSALX_LIME_EXPLAINER_H_
#define CAUSALX_LIME_EXPLAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace causalx {

struct Perturbation {
  std::vector<bool> kept_mask;  // one entry per word of the original
  std::string variant_text;     // kept words joined by single spaces
};

struct WordWeight {
  std::string word;
  int position = 0;
  double weight = 0.0;
};

struct Explanation {
  std::vector<WordWeight> word_weights;  // sorted by |weight| descending
  double intercept = 0.0;
  int n_samples = 0;
  std::string classifier_label;
  std::uint64_t seed = 0;
};

// Probability (or any real score) of the explained label for a text.
using ScoreFn = std::function<double(const std::string& text)>;

struct LimeOptions {
  int n_samples = 500;
  std::uint64_t seed = 42;
  double keep_probability = 0.5;
  double kernel_width = 0.25;
  double ridge = 1e-6;
  // Score every non-empty subset of words instead of sampling; needs at
  // most kMaxExhaustiveWords words.
  bool exhaustive = false;
  std::string label;  // recorded in the explanation
};

inline constexpr int kMaxExhaustiveWords = 16;

std::string VariantText(std::span<const std::string> words,
                        const std::vector<bool>& kept_mask);

// Sample 0 keeps every word; the others keep each word independently with
// probability 0.5, redrawing masks that drop everything. Throws kEmptyInput
// for no words and kInvalidArgument for n_samples < 1.
std::vector<Perturbation> PerturbSentence(std::span<const std::string> words,
                                          int n_samples, std::uint64_t seed,
                                          double keep_probability = 0.5);

// All 2^k - 1 non-empty masks, the full mask first.
std::vector<Perturbation> ExhaustivePerturbations(
    std::span<const std::string> words);

// Weighted ridge fit with sample weights exp(-(1 - kept_fraction)^2 / w^2).
// The intercept is not penalized. Exceptions thrown by the classifier and
// non-finite scores surface as kClassifierError.
Explanation Explain(const ScoreFn& classifier,
                    std::span<const std::string> words,
                    const LimeOptions& options = {});
// Splits the sentence with Tokenize.
Explanation Explain(const ScoreFn& classifier, std::string_view sentence,
                    const LimeOptions& options = {});

nlohmann::json ToJson(const Explanation& explanation);

}  // namespace causalx

#endif  // CAUSALX_LIME_EXPLAINER_H_
