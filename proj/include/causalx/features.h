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

// Tokenization, stop words, word n-grams, vocabularies with hashed n-gram
// buckets, bag-of-trigram vectors, node masking and fixed-length encoding.

#ifndef CAUSALX_FEATURES_H_
#define CAUSALX_FEATURES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "causalx/corpus.h"
#include "causalx/span.h"
#include "json.hpp"

namespace causalx {

// Joins the members of a word n-gram (U+241F SYMBOL FOR UNIT SEPARATOR).
inline constexpr std::string_view kNgramSeparator = "\xE2\x90\x9F";
inline constexpr int kMaxSequenceLength = 70;
inline constexpr std::string_view kNode1Token = "node1";
inline constexpr std::string_view kNode2Token = "node2";

struct Token {
  std::string surface;
  Span char_span;  // byte offsets into the source text

  friend bool operator==(const Token&, const Token&) = default;
};

// Lowercases and folds typographic variants (curly quotes, dashes,
// ligatures). Every punctuation character becomes its own token; hyphens
// between word characters and '.'/',' between digits stay inside the word.
std::vector<Token> Tokenize(std::string_view text);

std::vector<std::string> Surfaces(std::span<const Token> tokens);
std::vector<std::string> TokenizeToStrings(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;

// The shipped English list (data/stopwords.txt, compiled in).
const StopwordSet& DefaultStopwords();
// Newline-delimited UTF-8 file; '#' starts a comment line.
StopwordSet LoadStopwords(const std::string& path);
StopwordSet ParseStopwords(std::string_view contents);

// node1/node2 are never removed.
std::vector<Token> RemoveStopwords(std::span<const Token> tokens,
                                   const StopwordSet& stopwords =
                                       DefaultStopwords());
std::vector<std::string> RemoveStopwords(std::span<const std::string> tokens,
                                         const StopwordSet& stopwords =
                                             DefaultStopwords());

// Throws kInvalidNgramOrder when n < 1.
std::vector<std::string> WordNgrams(std::span<const std::string> tokens, int n);
std::vector<std::string> WordNgrams(std::span<const Token> tokens, int n);

std::uint64_t Fnv1a64(std::string_view bytes);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kNode1 = 2;
  static constexpr int kNode2 = 3;
  static constexpr int kNumSpecial = 4;

  Vocabulary() = default;

  // Number of word entries including the special tokens.
  int size() const { return static_cast<int>(words_.size()); }
  int bucket_count() const { return bucket_count_; }
  int n_gram_order() const { return n_gram_order_; }
  int min_count() const { return min_count_; }
  // Rows needed by an embedding table over words and n-gram buckets.
  std::int64_t total_size() const {
    return static_cast<std::int64_t>(size()) + bucket_count_;
  }

  std::optional<int> Find(std::string_view word) const;
  // UNK for out-of-vocabulary words.
  int IndexOf(std::string_view word) const;
  const std::string& WordAt(int index) const { return words_.at(index); }
  std::int64_t CountAt(int index) const { return counts_.at(index); }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  // Bucket id of a joined n-gram in [size(), size() + bucket_count()), or
  // nullopt when no buckets are configured.
  std::optional<std::int64_t> NgramId(std::string_view joined) const;

  nlohmann::json ToJson() const;
  static Vocabulary FromJson(const nlohmann::json& j);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_ &&
           a.min_count_ == b.min_count_ && a.n_gram_order_ == b.n_gram_order_ &&
           a.bucket_count_ == b.bucket_count_;
  }

 private:
  friend Vocabulary BuildVocab(std::span<const std::vector<std::string>>, int,
                               int, int);
  void Reindex();

  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
  int min_count_ = 1;
  int n_gram_order_ = 1;
  int bucket_count_ = 0;
};

// Words with frequency >= min_count get dense ids after the special tokens,
// by descending frequency with lexicographic tie-breaks. Throws kEmptyCorpus
// for an empty corpus, kInvalidNgramOrder for n_gram_order < 1 and
// kInvalidArgument for min_count < 1 or bucket_count < 0.
Vocabulary BuildVocab(std::span<const std::vector<std::string>> corpus,
                      int min_count, int n_gram_order, int bucket_count);

// Word ids followed by bucket ids for n-grams of order 2..n_gram_order().
std::vector<std::int64_t> FeatureIds(const Vocabulary& vocab,
                                     std::span<const std::string> tokens);

struct SparseVector {
  std::vector<std::int64_t> indices;  // strictly increasing
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double L1() const;
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

// Raw trigram counts over the hashed bucket space. Requires a vocabulary
// with n_gram_order() >= 3 and buckets (kInvalidArgument otherwise).
SparseVector BowTrigramVector(std::span<const std::string> tokens,
                              const Vocabulary& vocab);

// Replaces the two byte ranges of `text` with node1 / node2. Throws
// kInvalidSpan for empty, out-of-range or overlapping spans.
std::string MaskNodes(std::string_view text, Span node1, Span node2);
std::string MaskNodes(const Sentence& sentence, Span node1, Span node2);

struct EncodedSequence {
  std::vector<int> ids;     // kMaxSequenceLength entries
  std::vector<bool> mask;   // true on real tokens
  int original_length = 0;  // before truncation

  int length() const;  // min(original_length, kMaxSequenceLength)
  friend bool operator==(const EncodedSequence&,
                         const EncodedSequence&) = default;
};

EncodedSequence EncodeSequence(std::span<const std::string> tokens,
                               const Vocabulary& vocab);

}  // namespace causalx

#endif  // CAUSALX_FEATURES_H_
