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

// Plain-text document ingestion: boilerplate cleaning, sentence
// segmentation, hypothesis-marker mining and descriptive statistics.

#ifndef CAUSALX_CORPUS_H_
#define CAUSALX_CORPUS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/record.h"
#include "causalx/span.h"
#include "json.hpp"

namespace causalx {

struct Document {
  std::string doc_id;
  std::string raw_text;
  // Unset until CleanText has run.
  std::optional<std::string> cleaned_text;
};

struct Sentence {
  std::string sentence_id;
  std::string doc_id;
  std::string text;
  Span char_span;  // into the parent's cleaned_text
  int word_count = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Candidate {
  Sentence sentence;
  std::string marker;
  Span marker_span;  // into sentence.text
};

struct MarkerMatch {
  std::string marker;
  Span span;
};

// Buckets and limits for the descriptive statistics.
inline constexpr int kMaxCountedWords = 70;
inline constexpr int kHistogramBucketWidth = 5;

struct CorpusStats {
  int n_documents = 0;
  int n_sentences = 0;
  int n_hypotheses = 0;
  double hypotheses_per_doc_mean = 0.0;
  double hypotheses_per_doc_std = 0.0;
  double word_count_mean = 0.0;
  double word_count_std = 0.0;
  std::map<int, int> word_count_histogram;  // bucket start -> count
  std::map<std::string, double> direction_proportions;
  std::map<std::string, double> causality_proportions;
};

// Throws kEmptyDocument for empty text and kInvalidUtf8 for malformed input.
Document LoadDocument(std::string doc_id, std::string text);

// Removes caption lines ("Table 3: ...", "Figure 2. ..."), lines where fewer
// than 40% of the non-blank characters are letters, and lines occurring
// verbatim three or more times (running headers and footers). Blank lines
// and line order are kept.
std::string CleanLines(std::string_view text);
Document CleanText(Document doc);

// Splits on '.', '?' or '!' followed by whitespace and an uppercase letter or
// digit, unless the period closes a known abbreviation, an initial, or a
// hypothesis marker ("H1.", "Hypothesis 2."). Blank lines also end a
// sentence. Requires cleaned_text; throws kInvalidArgument otherwise.
std::vector<Sentence> SegmentSentences(const Document& doc);

// Whitespace-delimited token count.
int CountWords(std::string_view text);

// Leftmost match of the marker grammar: the case-insensitive word
// "hypothesis" optionally followed by a number (and one letter), or an
// uppercase standalone "H" immediately followed by digits and an optional
// letter. Both forms need word boundaries on either side.
std::optional<MarkerMatch> FindMarker(std::string_view text);

std::vector<Candidate> ExtractCandidates(std::span<const Sentence> sentences);

// Population standard deviations throughout. Word-count statistics ignore
// sentences longer than kMaxCountedWords. Throws kEmptyCorpus when no
// sentences are given.
CorpusStats ComputeCorpusStats(std::span<const Sentence> sentences,
                               std::span<const HypothesisRecord> records);

nlohmann::json ToJson(const CorpusStats& stats);
nlohmann::json ToJson(const Sentence& sentence);
Sentence SentenceFromJson(const nlohmann::json& j);

bool IsValidUtf8(std::string_view text);

}  // namespace causalx

#endif  // CAUSALX_CORPUS_H_
