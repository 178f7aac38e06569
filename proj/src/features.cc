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

#include "causalx/features.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "causalx/error.h"

namespace causalx {

using nlohmann::json;

namespace {

enum class CharClass { kSpace, kWord, kPunct };

struct CodePoint {
  std::string normalized;  // lowercased, folded UTF-8
  Span bytes;
  CharClass klass;
  bool digit;
};

void AppendUtf8(char32_t cp, std::string* out) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Lenient decoder: malformed bytes decode as U+FFFD of length one.
char32_t Decode(std::string_view s, std::size_t i, std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t n;
  char32_t cp;
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    n = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 4;
    cp = b0 & 0x07;
  } else {
    *len = 1;
    return 0xFFFD;
  }
  if (i + n > s.size()) {
    *len = 1;
    return 0xFFFD;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      *len = 1;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  *len = n;
  return cp;
}

bool IsUnicodeSpace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200B) ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

char32_t LowerCodePoint(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F && cp % 2 == 0 && cp != 0x130 &&
      cp != 0x138) {
    return cp + 1;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  return cp;
}

std::string Normalize(char32_t cp) {
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201A: case 0x2032: return "'";
    case 0x201C: case 0x201D: case 0x201E: case 0x2033: return "\"";
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
    case 0x2212: return "-";
    case 0x2026: return "...";
    case 0xFB00: return "ff";
    case 0xFB01: return "fi";
    case 0xFB02: return "fl";
    case 0xFB03: return "ffi";
    case 0xFB04: return "ffl";
    default: break;
  }
  std::string out;
  AppendUtf8(LowerCodePoint(cp), &out);
  return out;
}

bool IsWordCodePoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '_';
  }
  if (cp == 0xFFFD) return false;
  if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFB00 && cp <= 0xFB06) return true;
  if (cp >= 0xFE30 && cp <= 0xFE6F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  return true;
}

std::vector<CodePoint> Classify(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    std::size_t len;
    const char32_t cp = Decode(text, i, &len);
    CodePoint c;
    c.bytes = Span{i, i + len};
    c.digit = cp >= '0' && cp <= '9';
    if (IsUnicodeSpace(cp)) {
      c.klass = CharClass::kSpace;
    } else {
      c.normalized = Normalize(cp);
      c.klass = IsWordCodePoint(cp) ? CharClass::kWord : CharClass::kPunct;
    }
    out.push_back(std::move(c));
    i += len;
  }
  return out;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  const std::vector<CodePoint> cps = Classify(text);
  std::vector<Token> tokens;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const CodePoint& c = cps[i];
    if (c.klass == CharClass::kSpace) {
      ++i;
      continue;
    }
    if (c.klass == CharClass::kPunct) {
      tokens.push_back(Token{c.normalized, c.bytes});
      ++i;
      continue;
    }
    Token token;
    token.char_span.begin = c.bytes.begin;
    std::size_t j = i;
    while (j < n) {
      if (cps[j].klass == CharClass::kWord) {
        token.surface += cps[j].normalized;
        ++j;
        continue;
      }
      // Joiners kept inside a word: hyphen between word characters, and a
      // period or comma between digits.
      if (j + 1 < n && cps[j].klass == CharClass::kPunct &&
          cps[j + 1].klass == CharClass::kWord) {
        const std::string& p = cps[j].normalized;
        const bool hyphen = p == "-";
        const bool numeric = (p == "." || p == ",") && cps[j - 1].digit &&
                             cps[j + 1].digit;
        if (hyphen || numeric) {
          token.surface += p;
          ++j;
          continue;
        }
      }
      break;
    }
    token.char_span.end = cps[j - 1].bytes.end;
    tokens.push_back(std::move(token));
    i = j;
  }
  return tokens;
}

std::vector<std::string> Surfaces(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> TokenizeToStrings(std::string_view text) {
  return Surfaces(Tokenize(text));
}

StopwordSet ParseStopwords(std::string_view contents) {
  StopwordSet out;
  std::size_t start = 0;
  while (start <= contents.size()) {
    std::size_t nl = contents.find('\n', start);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(start, nl - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      line.remove_prefix(1);
    }
    if (!line.empty() && line.front() != '#') out.emplace(line);
    start = nl + 1;
  }
  return out;
}

const StopwordSet& DefaultStopwords() {
  static const StopwordSet kStopwords = ParseStopwords(
#include "stopwords_data.inc"
  );
  return kStopwords;
}

StopwordSet LoadStopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open stop-word file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseStopwords(buffer.str());
}

namespace {
bool IsNodeToken(std::string_view s) {
  return s == kNode1Token || s == kNode2Token;
}
}  // namespace

std::vector<Token> RemoveStopwords(std::span<const Token> tokens,
                                   const StopwordSet& stopwords) {
  std::vector<Token> out;
  for (const Token& t : tokens) {
    if (IsNodeToken(t.surface) || !stopwords.count(t.surface)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> RemoveStopwords(std::span<const std::string> tokens,
                                         const StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (const std::string& t : tokens) {
    if (IsNodeToken(t) || !stopwords.count(t)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> WordNgrams(std::span<const std::string> tokens,
                                    int n) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidNgramOrder,
                "n-gram order must be >= 1, got " + std::to_string(n));
  }
  std::vector<std::string> out;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return out;
  out.reserve(tokens.size() - order + 1);
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      gram += kNgramSeparator;
      gram += tokens[i + k];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

std::vector<std::string> WordNgrams(std::span<const Token> tokens, int n) {
  const std::vector<std::string> surfaces = Surfaces(tokens);
  return WordNgrams(surfaces, n);
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::optional<int> Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::IndexOf(std::string_view word) const {
  return Find(word).value_or(kUnk);
}

std::optional<std::int64_t> Vocabulary::NgramId(std::string_view joined) const {
  if (bucket_count_ <= 0) return std::nullopt;
  return static_cast<std::int64_t>(size()) +
         static_cast<std::int64_t>(Fnv1a64(joined) %
                                   static_cast<std::uint64_t>(bucket_count_));
}

void Vocabulary::Reindex() {
  index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) {
    index_.emplace(words_[i], static_cast<int>(i));
  }
}

json Vocabulary::ToJson() const {
  return json{{"words", words_},
              {"counts", counts_},
              {"min_count", min_count_},
              {"n_gram_order", n_gram_order_},
              {"bucket_count", bucket_count_}};
}

Vocabulary Vocabulary::FromJson(const json& j) {
  Vocabulary v;
  try {
    v.words_ = j.at("words").get<std::vector<std::string>>();
    v.counts_ = j.at("counts").get<std::vector<std::int64_t>>();
    v.min_count_ = j.at("min_count").get<int>();
    v.n_gram_order_ = j.at("n_gram_order").get<int>();
    v.bucket_count_ = j.at("bucket_count").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad vocabulary: ") + e.what());
  }
  if (v.words_.size() != v.counts_.size() ||
      v.words_.size() < static_cast<std::size_t>(kNumSpecial)) {
    throw Error(ErrorCode::kFormat, "vocabulary words/counts mismatch");
  }
  v.Reindex();
  return v;
}

Vocabulary BuildVocab(std::span<const std::vector<std::string>> corpus,
                      int min_count, int n_gram_order, int bucket_count) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty corpus");
  if (n_gram_order < 1) {
    throw Error(ErrorCode::kInvalidNgramOrder,
                "n-gram order must be >= 1, got " +
                    std::to_string(n_gram_order));
  }
  if (min_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  }
  if (bucket_count < 0) {
    throw Error(ErrorCode::kInvalidArgument, "bucket_count must be >= 0");
  }
  std::map<std::string, std::int64_t> freq;
  std::int64_t node1 = 0, node2 = 0;
  for (const auto& sentence : corpus) {
    for (const std::string& token : sentence) {
      if (token == kNode1Token) {
        ++node1;
      } else if (token == kNode2Token) {
        ++node2;
      } else {
        ++freq[token];
      }
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> entries;
  for (auto& [word, count] : freq) {
    if (count >= min_count && word != "<pad>" && word != "<unk>") {
      entries.emplace_back(word, count);
    }
  }
  // std::map iteration is already lexicographic; stable_sort keeps it for
  // frequency ties.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });

  Vocabulary v;
  v.min_count_ = min_count;
  v.n_gram_order_ = n_gram_order;
  v.bucket_count_ = bucket_count;
  v.words_ = {"<pad>", "<unk>", std::string(kNode1Token),
              std::string(kNode2Token)};
  v.counts_ = {0, 0, node1, node2};
  for (auto& [word, count] : entries) {
    v.words_.push_back(word);
    v.counts_.push_back(count);
  }
  v.Reindex();
  return v;
}

std::vector<std::int64_t> FeatureIds(const Vocabulary& vocab,
                                     std::span<const std::string> tokens) {
  std::vector<std::int64_t> ids;
  ids.reserve(tokens.size() * static_cast<std::size_t>(vocab.n_gram_order()));
  for (const std::string& t : tokens) ids.push_back(vocab.IndexOf(t));
  if (vocab.bucket_count() > 0) {
    for (int n = 2; n <= vocab.n_gram_order(); ++n) {
      for (const std::string& gram : WordNgrams(tokens, n)) {
        ids.push_back(*vocab.NgramId(gram));
      }
    }
  }
  return ids;
}

double SparseVector::L1() const {
  double sum = 0.0;
  for (double v : values) sum += v < 0 ? -v : v;
  return sum;
}

SparseVector BowTrigramVector(std::span<const std::string> tokens,
                              const Vocabulary& vocab) {
  if (vocab.n_gram_order() < 3 || vocab.bucket_count() <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "trigram features need n_gram_order >= 3 and buckets");
  }
  std::map<std::int64_t, double> counts;
  for (const std::string& gram : WordNgrams(tokens, 3)) {
    counts[*vocab.NgramId(gram)] += 1.0;
  }
  SparseVector v;
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    v.indices.push_back(index);
    v.values.push_back(count);
  }
  return v;
}

std::string MaskNodes(std::string_view text, Span node1, Span node2) {
  for (const Span& s : {node1, node2}) {
    if (s.empty() || s.end > text.size()) {
      throw Error(ErrorCode::kInvalidSpan,
                  "span [" + std::to_string(s.begin) + ", " +
                      std::to_string(s.end) + ") is empty or out of range");
    }
  }
  if (node1.Overlaps(node2)) {
    throw Error(ErrorCode::kInvalidSpan, "node spans overlap");
  }
  const bool node1_first = node1.begin < node2.begin;
  const Span& first = node1_first ? node1 : node2;
  const Span& second = node1_first ? node2 : node1;
  std::string out;
  out.reserve(text.size());
  out.append(text.substr(0, first.begin));
  out.append(node1_first ? kNode1Token : kNode2Token);
  out.append(text.substr(first.end, second.begin - first.end));
  out.append(node1_first ? kNode2Token : kNode1Token);
  out.append(text.substr(second.end));
  return out;
}

std::string MaskNodes(const Sentence& sentence, Span node1, Span node2) {
  return MaskNodes(sentence.text, node1, node2);
}

int EncodedSequence::length() const {
  return std::min(original_length, kMaxSequenceLength);
}

EncodedSequence EncodeSequence(std::span<const std::string> tokens,
                               const Vocabulary& vocab) {
  EncodedSequence seq;
  seq.ids.assign(kMaxSequenceLength, Vocabulary::kPad);
  seq.mask.assign(kMaxSequenceLength, false);
  seq.original_length = static_cast<int>(tokens.size());
  const int n = seq.length();
  for (int i = 0; i < n; ++i) {
    seq.ids[i] = vocab.IndexOf(tokens[i]);
    seq.mask[i] = true;
  }
  return seq;
}

}  // namespace causalx
