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

// Labeled example types for the three tasks and their JSONL / TSV forms.
// Every JSONL line carries a "task" field so corpora can mix tasks.

#ifndef CAUSALX_DATASETS_H_
#define CAUSALX_DATASETS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/record.h"
#include "causalx/span.h"
#include "json.hpp"

namespace causalx {

inline constexpr std::string_view kHypothesisLabel = "hypothesis";
inline constexpr std::string_view kNonHypothesisLabel = "non_hypothesis";
inline constexpr std::string_view kCausalLabel = "causal";
inline constexpr std::string_view kAssociativeLabel = "associative";

struct TextExample {
  std::string text;
  std::string label;  // hypothesis | non_hypothesis
  std::string sentence_id;

  friend bool operator==(const TextExample&, const TextExample&) = default;
};

struct CausalityExample {
  std::string masked;  // node1 / node2 substituted
  std::string label;   // causal | associative
  std::string sentence;
  Span node1_span;  // into sentence
  Span node2_span;
  std::optional<Direction> direction;
  std::string sentence_id;

  friend bool operator==(const CausalityExample&,
                         const CausalityExample&) = default;
};

struct TaggingExample {
  std::vector<std::string> tokens;
  std::vector<int> labels;  // 0 / 1 / 2 per token
  std::string sentence_id;

  friend bool operator==(const TaggingExample&,
                         const TaggingExample&) = default;
};

struct LabeledCorpus {
  std::vector<TextExample> hypothesis;
  std::vector<CausalityExample> causality;
  std::vector<TaggingExample> tagging;

  bool empty() const {
    return hypothesis.empty() && causality.empty() && tagging.empty();
  }
};

nlohmann::json ToJson(const TextExample& e);
nlohmann::json ToJson(const CausalityExample& e);
nlohmann::json ToJson(const TaggingExample& e);

// One JSON object per line, hypothesis rows first, then causality, then
// tagging.
std::string ToJsonl(const LabeledCorpus& corpus);
// Throws kFormat on malformed lines; blank lines are skipped.
LabeledCorpus ParseJsonl(std::string_view text);

// TSV forms. hypothesis: text<TAB>label. causality:
// sentence<TAB>node1<TAB>node2<TAB>direction<TAB>causality. tagging:
// space-joined tokens<TAB>space-joined tags. Tabs and newlines inside
// fields are replaced by spaces.
std::string HypothesisTsv(const std::vector<TextExample>& rows);
std::string CausalityTsv(const std::vector<CausalityExample>& rows);
std::string TaggingTsv(const std::vector<TaggingExample>& rows);
std::vector<TextExample> ParseHypothesisTsv(std::string_view text);
// Node spans are recovered as the first occurrences of the node strings.
std::vector<CausalityExample> ParseCausalityTsv(std::string_view text);
std::vector<TaggingExample> ParseTaggingTsv(std::string_view text);

// Per-token tags from byte spans: tokens inside node1 get 1, inside node2
// get 2, all others 0.
std::vector<int> TagsFromSpans(std::string_view sentence, Span node1,
                               Span node2, std::vector<std::string>* tokens);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace causalx

#endif  // CAUSALX_DATASETS_H_
