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

#include "causalx/lime_explainer.h"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Dense>

#include "causalx/error.h"
#include "causalx/features.h"
#include "causalx/random.h"

namespace causalx {

using nlohmann::json;

std::string VariantText(std::span<const std::string> words,
                        const std::vector<bool>& kept_mask) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!kept_mask[i]) continue;
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::vector<Perturbation> PerturbSentence(std::span<const std::string> words,
                                          int n_samples, std::uint64_t seed,
                                          double keep_probability) {
  if (words.empty()) throw Error(ErrorCode::kEmptyInput, "no words to perturb");
  if (n_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  }
  Rng rng(seed);
  std::vector<Perturbation> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  std::vector<bool> full(words.size(), true);
  out.push_back(Perturbation{full, VariantText(words, full)});
  while (static_cast<int>(out.size()) < n_samples) {
    std::vector<bool> mask(words.size());
    bool any = false;
    for (std::size_t i = 0; i < words.size(); ++i) {
      mask[i] = Bernoulli(rng, keep_probability);
      any = any || mask[i];
    }
    if (!any) continue;
    std::string text = VariantText(words, mask);
    out.push_back(Perturbation{std::move(mask), std::move(text)});
  }
  return out;
}

std::vector<Perturbation> ExhaustivePerturbations(
    std::span<const std::string> words) {
  if (words.empty()) throw Error(ErrorCode::kEmptyInput, "no words to perturb");
  if (words.size() > static_cast<std::size_t>(kMaxExhaustiveWords)) {
    throw Error(ErrorCode::kInvalidArgument,
                "exhaustive design limited to " +
                    std::to_string(kMaxExhaustiveWords) + " words");
  }
  const std::size_t k = words.size();
  const std::uint64_t full = (std::uint64_t{1} << k) - 1;
  std::vector<Perturbation> out;
  out.reserve(full);
  for (std::uint64_t bits = full; bits >= 1; --bits) {
    std::vector<bool> mask(k);
    for (std::size_t i = 0; i < k; ++i) mask[i] = (bits >> i) & 1;
    std::string text = VariantText(words, mask);
    out.push_back(Perturbation{std::move(mask), std::move(text)});
  }
  return out;
}

Explanation Explain(const ScoreFn& classifier,
                    std::span<const std::string> words,
                    const LimeOptions& options) {
  const std::vector<Perturbation> samples =
      options.exhaustive
          ? ExhaustivePerturbations(words)
          : PerturbSentence(words, options.n_samples, options.seed,
                            options.keep_probability);
  const auto n = static_cast<Eigen::Index>(samples.size());
  const auto k = static_cast<Eigen::Index>(words.size());

  Eigen::VectorXd scores(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s;
    try {
      s = classifier(samples[i].variant_text);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kClassifierError,
                  std::string("classifier failed on variant: ") + e.what());
    }
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kClassifierError, "classifier returned non-finite");
    }
    scores[i] = s;
  }

  // Rows: sqrt(pi_i) * [1, z_i] for each sample, then sqrt(ridge) * e_j for
  // each word column, so that least squares solves the weighted ridge
  // problem directly.
  const bool ridge_rows = options.ridge > 0;
  const Eigen::Index rows = n + (ridge_rows ? k : 0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, k + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  const double width2 = options.kernel_width * options.kernel_width;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& mask = samples[i].kept_mask;
    const double kept =
        static_cast<double>(std::count(mask.begin(), mask.end(), true)) /
        static_cast<double>(k);
    const double root =
        std::sqrt(std::exp(-(1.0 - kept) * (1.0 - kept) / width2));
    a(i, 0) = root;
    for (Eigen::Index j = 0; j < k; ++j) a(i, j + 1) = mask[j] ? root : 0.0;
    b[i] = root * scores[i];
  }
  if (ridge_rows) {
    const double r = std::sqrt(options.ridge);
    for (Eigen::Index j = 0; j < k; ++j) a(n + j, j + 1) = r;
  }
  const Eigen::VectorXd theta = a.colPivHouseholderQr().solve(b);

  Explanation ex;
  ex.intercept = theta[0];
  ex.n_samples = static_cast<int>(n);
  ex.classifier_label = options.label;
  ex.seed = options.seed;
  for (Eigen::Index j = 0; j < k; ++j) {
    ex.word_weights.push_back(
        WordWeight{words[j], static_cast<int>(j), theta[j + 1]});
  }
  std::stable_sort(ex.word_weights.begin(), ex.word_weights.end(),
                   [](const WordWeight& x, const WordWeight& y) {
                     return std::abs(x.weight) > std::abs(y.weight);
                   });
  return ex;
}

Explanation Explain(const ScoreFn& classifier, std::string_view sentence,
                    const LimeOptions& options) {
  const std::vector<std::string> words = TokenizeToStrings(sentence);
  return Explain(classifier, std::span<const std::string>(words), options);
}

json ToJson(const Explanation& ex) {
  json weights = json::array();
  for (const WordWeight& w : ex.word_weights) {
    weights.push_back(
        {{"word", w.word}, {"position", w.position}, {"weight", w.weight}});
  }
  return json{{"label", ex.classifier_label},
              {"intercept", ex.intercept},
              {"weights", weights},
              {"n_samples", ex.n_samples},
              {"seed", ex.seed}};
}

}  // namespace causalx
