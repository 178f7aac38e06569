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

// Template corpus with known ground truth for all three tasks.

#ifndef CAUSALX_SYNTHETIC_H_
#define CAUSALX_SYNTHETIC_H_

#include <cstdint>
#include <set>
#include <string>

#include "causalx/datasets.h"

namespace causalx {

// n_per_class hypothesis and non-hypothesis sentences, n_per_class causal
// and associative hypotheses, and one tagging row per causality row.
// Throws kInvalidArgument when n_per_class < 10.
LabeledCorpus GenerateSynthetic(std::uint64_t seed, int n_per_class);

// Relation vocabulary used by the hypothesis templates, lowercased.
const std::set<std::string>& ConnectiveWords();

}  // namespace causalx

#endif  // CAUSALX_SYNTHETIC_H_
