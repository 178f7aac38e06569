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

#include "causalx/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

#include "causalx/error.h"

namespace causalx {

using nlohmann::json;

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
// Same class as the regex \w: ASCII letters, digits and underscore.
bool IsWordChar(char c) { return IsAlpha(c) || IsDigit(c) || c == '_'; }

char Lower(char c) { return IsUpper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = Lower(c);
  return out;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Decodes one UTF-8 code point at s[i]; returns its byte length or 0 when
// malformed.
std::size_t DecodeUtf8(std::string_view s, std::size_t i, char32_t* out) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len;
  char32_t cp;
  if (b0 < 0x80) {
    *out = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  *out = cp;
  return len;
}

bool IsLetterCodePoint(char32_t cp) {
  if (cp < 0x80) return IsAlpha(static_cast<char>(cp));
  if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols
  return true;
}

bool IsCaptionLine(std::string_view line) {
  static constexpr std::string_view kHeads[] = {"Table", "TABLE", "Figure",
                                                "FIGURE", "Fig.", "Tab."};
  for (std::string_view head : kHeads) {
    if (!StartsWith(line, head)) continue;
    std::size_t i = head.size();
    std::size_t spaces = 0;
    while (i < line.size() && IsSpace(line[i])) ++i, ++spaces;
    if (spaces == 0 && head.back() != '.') continue;
    if (i >= line.size() || !(IsDigit(line[i]) || line[i] == 'A')) continue;
    // Appendix tables: "Table A1".
    if (line[i] == 'A') ++i;
    std::size_t digits = 0;
    while (i < line.size() && IsDigit(line[i])) ++i, ++digits;
    if (digits == 0) continue;
    if (i < line.size() && IsAlpha(line[i]) &&
        (i + 1 == line.size() || !IsAlpha(line[i + 1]))) {
      ++i;
    }
    if (i == line.size()) return true;
    const char c = line[i];
    if (c == ':' || c == '.' || c == '-' || c == '|') return true;
    if (IsSpace(c)) {
      while (i < line.size() && IsSpace(line[i])) ++i;
      if (i == line.size()) return true;
      // "Table 3 Regression results" is a caption, "Table 3 shows" is prose.
      if (IsUpper(line[i]) || !IsAlpha(line[i])) return true;
      // En dash or em dash separators.
      if (StartsWith(line.substr(i), "\xE2\x80\x93") ||
          StartsWith(line.substr(i), "\xE2\x80\x94")) {
        return true;
      }
    }
  }
  return false;
}

bool IsMostlyNonAlphabetic(std::string_view line) {
  std::size_t letters = 0, visible = 0;
  for (std::size_t i = 0; i < line.size();) {
    char32_t cp;
    std::size_t len = DecodeUtf8(line, i, &cp);
    if (len == 0) {
      len = 1;
      cp = 0xFFFD;
    }
    if (!(cp < 0x80 && IsSpace(static_cast<char>(cp))) && cp != 0xA0) {
      ++visible;
      if (IsLetterCodePoint(cp)) ++letters;
    }
    i += len;
  }
  if (visible == 0) return false;
  return static_cast<double>(letters) < 0.4 * static_cast<double>(visible);
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

const std::set<std::string, std::less<>>& Abbreviations() {
  static const std::set<std::string, std::less<>> kAbbreviations = {
      "al",   "e.g",  "i.e",  "fig",   "figs", "vs",   "cf",    "eq",
      "eqs",  "no",   "nos",  "dr",    "mr",   "mrs",  "ms",    "prof",
      "inc",  "ltd",  "co",   "corp",  "jr",   "sr",   "st",    "pp",
      "p",    "vol",  "vols", "approx", "resp", "u.s", "u.k",   "tab",
      "sec",  "ch",   "ed",   "eds",   "et",   "ca",   "viz",   "op",
      "n.b",  "ibid", "dept", "univ",  "assn", "est",  "min",   "max"};
  return kAbbreviations;
}

bool IsMarkerToken(std::string_view token) {
  if (token.size() < 2 || token[0] != 'H' || !IsDigit(token[1])) return false;
  std::size_t i = 1;
  while (i < token.size() && IsDigit(token[i])) ++i;
  if (i < token.size() && IsAlpha(token[i])) ++i;
  return i == token.size();
}

bool IsMarkerNumber(std::string_view token) {
  std::size_t i = 0;
  while (i < token.size() && IsDigit(token[i])) ++i;
  if (i == 0) return false;
  if (i < token.size() && IsAlpha(token[i])) ++i;
  return i == token.size();
}

// Word ending right before position `end` (exclusive), bounded by `floor`.
std::string_view WordBefore(std::string_view s, std::size_t floor,
                            std::size_t end) {
  std::size_t k = end;
  while (k > floor && !IsSpace(s[k - 1])) --k;
  std::string_view word = s.substr(k, end - k);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' ||
                           word.front() == '\'' || word.front() == '[')) {
    word.remove_prefix(1);
  }
  return word;
}

bool IsNonTerminalPeriod(std::string_view s, std::size_t floor,
                         std::size_t period) {
  std::string_view word = WordBefore(s, floor, period);
  if (word.empty()) return false;
  if (word.size() == 1 && IsAlpha(word[0])) return true;
  if (Abbreviations().count(ToLower(word))) return true;
  if (IsMarkerToken(word)) return true;
  if (IsMarkerNumber(word)) {
    std::size_t k = period - word.size();
    while (k > floor && IsSpace(s[k - 1])) --k;
    if (ToLower(WordBefore(s, floor, k)) == "hypothesis") return true;
  }
  return false;
}

bool IsCloser(char c) {
  return c == ')' || c == ']' || c == '"' || c == '\'';
}
bool IsOpener(char c) { return c == '(' || c == '[' || c == '"' || c == '\''; }

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double PopulationStd(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

bool IsValidUtf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    char32_t cp;
    const std::size_t len = DecodeUtf8(text, i, &cp);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

Document LoadDocument(std::string doc_id, std::string text) {
  if (text.empty()) {
    throw Error(ErrorCode::kEmptyDocument, "document '" + doc_id + "' is empty");
  }
  if (!IsValidUtf8(text)) {
    throw Error(ErrorCode::kInvalidUtf8,
                "document '" + doc_id + "' is not valid UTF-8");
  }
  return Document{std::move(doc_id), std::move(text), std::nullopt};
}

std::string CleanLines(std::string_view text) {
  const std::vector<std::string_view> lines = SplitLines(text);
  std::unordered_map<std::string_view, int> counts;
  for (std::string_view line : lines) {
    std::string_view t = Trim(line);
    if (!t.empty()) ++counts[t];
  }
  std::string out;
  out.reserve(text.size());
  bool first = true;
  for (std::string_view line : lines) {
    std::string_view t = Trim(line);
    if (!t.empty()) {
      if (counts[t] >= 3) continue;
      if (IsCaptionLine(t)) continue;
      if (IsMostlyNonAlphabetic(t)) continue;
    }
    if (!first) out.push_back('\n');
    out.append(line);
    first = false;
  }
  return out;
}

Document CleanText(Document doc) {
  doc.cleaned_text = CleanLines(doc.raw_text);
  return doc;
}

int CountWords(std::string_view text) {
  int words = 0;
  bool in_word = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

std::vector<Sentence> SegmentSentences(const Document& doc) {
  if (!doc.cleaned_text) {
    throw Error(ErrorCode::kInvalidArgument,
                "document '" + doc.doc_id + "' has not been cleaned");
  }
  std::string_view s = *doc.cleaned_text;
  const std::size_t n = s.size();
  std::vector<Sentence> out;
  std::optional<std::size_t> start;

  auto flush = [&](std::size_t end) {
    while (end > *start && IsSpace(s[end - 1])) --end;
    if (end > *start) {
      Sentence sentence;
      sentence.doc_id = doc.doc_id;
      sentence.sentence_id = doc.doc_id + ":" + std::to_string(out.size());
      sentence.char_span = Span{*start, end};
      sentence.text = std::string(s.substr(*start, end - *start));
      sentence.word_count = CountWords(sentence.text);
      out.push_back(std::move(sentence));
    }
    start.reset();
  };

  std::size_t i = 0;
  while (i < n) {
    const char c = s[i];
    if (!start) {
      if (IsSpace(c)) {
        ++i;
        continue;
      }
      start = i;
    }
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && s[j] != '\n' && IsSpace(s[j])) ++j;
      if (j < n && s[j] == '\n') {
        flush(i);
        i = j;
        continue;
      }
    }
    if (c == '.' || c == '?' || c == '!') {
      std::size_t end = i + 1;
      while (end < n && (s[end] == '.' || s[end] == '?' || s[end] == '!')) {
        ++end;
      }
      while (end < n && IsCloser(s[end])) ++end;
      std::size_t j = end;
      while (j < n && IsSpace(s[j])) ++j;
      if (j > end && j < n) {
        std::size_t k = j;
        if (IsOpener(s[k]) && k + 1 < n) ++k;
        const bool opens = IsUpper(s[k]) || IsDigit(s[k]);
        if (opens && !(c == '.' && IsNonTerminalPeriod(s, *start, i))) {
          flush(end);
          i = j;
          continue;
        }
      }
      i = end;
      continue;
    }
    ++i;
  }
  if (start) flush(n);
  return out;
}

std::optional<MarkerMatch> FindMarker(std::string_view s) {
  static constexpr std::string_view kWord = "hypothesis";
  const std::size_t n = s.size();
  // Optional "<digits><letter>?" at i followed by a word boundary; returns
  // the end offset or 0 when absent.
  auto number_end = [&](std::size_t i) -> std::size_t {
    std::size_t d = i;
    while (d < n && IsDigit(s[d])) ++d;
    if (d == i) return 0;
    if (d < n && IsAlpha(s[d]) && (d + 1 == n || !IsWordChar(s[d + 1]))) {
      return d + 1;
    }
    if (d == n || !IsWordChar(s[d])) return d;
    return 0;
  };
  for (std::size_t p = 0; p < n; ++p) {
    if (s[p] != 'H' && s[p] != 'h') continue;
    if (p > 0 && IsWordChar(s[p - 1])) continue;
    if (s[p] == 'H' && p + 1 < n && IsDigit(s[p + 1])) {
      if (std::size_t end = number_end(p + 1); end != 0) {
        return MarkerMatch{std::string(s.substr(p, end - p)), Span{p, end}};
      }
      continue;
    }
    if (p + kWord.size() > n) continue;
    bool same = true;
    for (std::size_t k = 0; k < kWord.size() && same; ++k) {
      same = Lower(s[p + k]) == kWord[k];
    }
    if (!same) continue;
    const std::size_t word_end = p + kWord.size();
    if (word_end < n && IsWordChar(s[word_end])) continue;
    std::size_t end = word_end;
    std::size_t r = word_end;
    while (r < n && IsSpace(s[r])) ++r;
    if (r > word_end) {
      if (std::size_t num = number_end(r); num != 0) end = num;
    }
    return MarkerMatch{std::string(s.substr(p, end - p)), Span{p, end}};
  }
  return std::nullopt;
}

std::vector<Candidate> ExtractCandidates(std::span<const Sentence> sentences) {
  std::vector<Candidate> out;
  for (const Sentence& sentence : sentences) {
    if (auto match = FindMarker(sentence.text)) {
      out.push_back(Candidate{sentence, std::move(match->marker), match->span});
    }
  }
  return out;
}

CorpusStats ComputeCorpusStats(std::span<const Sentence> sentences,
                               std::span<const HypothesisRecord> records) {
  if (sentences.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no sentences to summarize");
  }
  CorpusStats stats;
  stats.n_sentences = static_cast<int>(sentences.size());

  std::unordered_map<std::string_view, std::string_view> doc_of;
  std::map<std::string_view, int> hypotheses_in_doc;
  std::vector<double> word_counts;
  for (const Sentence& s : sentences) {
    doc_of[s.sentence_id] = s.doc_id;
    hypotheses_in_doc.try_emplace(s.doc_id, 0);
    if (s.word_count <= kMaxCountedWords) {
      word_counts.push_back(s.word_count);
      const int bucket =
          (s.word_count / kHistogramBucketWidth) * kHistogramBucketWidth;
      ++stats.word_count_histogram[bucket];
    }
  }
  stats.n_documents = static_cast<int>(hypotheses_in_doc.size());

  std::map<std::string, int> directions, causalities;
  int n_direction = 0, n_causality = 0;
  for (const HypothesisRecord& r : records) {
    auto it = doc_of.find(r.sentence_id);
    if (it == doc_of.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "record references unknown sentence '" + r.sentence_id + "'");
    }
    if (r.is_hypothesis.value_or(false)) {
      ++stats.n_hypotheses;
      ++hypotheses_in_doc[it->second];
    }
    if (r.direction) {
      ++directions[std::string(ToString(*r.direction))];
      ++n_direction;
    }
    if (r.causality) {
      ++causalities[std::string(ToString(*r.causality))];
      ++n_causality;
    }
  }

  std::vector<double> per_doc;
  for (const auto& [doc, count] : hypotheses_in_doc) per_doc.push_back(count);
  stats.hypotheses_per_doc_mean = Mean(per_doc);
  stats.hypotheses_per_doc_std = PopulationStd(per_doc);
  stats.word_count_mean = Mean(word_counts);
  stats.word_count_std = PopulationStd(word_counts);

  if (n_direction > 0) {
    for (Direction d :
         {Direction::kPositive, Direction::kNegative, Direction::kNonlinear}) {
      const std::string key(ToString(d));
      stats.direction_proportions[key] =
          static_cast<double>(directions[key]) / n_direction;
    }
  }
  if (n_causality > 0) {
    for (Causality c : {Causality::kCausal, Causality::kAssociative}) {
      const std::string key(ToString(c));
      stats.causality_proportions[key] =
          static_cast<double>(causalities[key]) / n_causality;
    }
  }
  return stats;
}

json ToJson(const CorpusStats& stats) {
  json histogram = json::object();
  for (const auto& [bucket, count] : stats.word_count_histogram) {
    histogram[std::to_string(bucket)] = count;
  }
  json j;
  j["n_documents"] = stats.n_documents;
  j["n_sentences"] = stats.n_sentences;
  j["n_hypotheses"] = stats.n_hypotheses;
  j["hypotheses_per_doc_mean"] = stats.hypotheses_per_doc_mean;
  j["hypotheses_per_doc_std"] = stats.hypotheses_per_doc_std;
  j["word_count_mean"] = stats.word_count_mean;
  j["word_count_std"] = stats.word_count_std;
  j["word_count_histogram"] = histogram;
  j["direction_proportions"] = json(stats.direction_proportions);
  j["causality_proportions"] = json(stats.causality_proportions);
  return j;
}

json ToJson(const Sentence& s) {
  return json{{"sentence_id", s.sentence_id},
              {"doc_id", s.doc_id},
              {"text", s.text},
              {"char_span", json::array({s.char_span.begin, s.char_span.end})},
              {"word_count", s.word_count}};
}

Sentence SentenceFromJson(const json& j) {
  try {
    Sentence s;
    s.sentence_id = j.at("sentence_id").get<std::string>();
    s.doc_id = j.at("doc_id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.char_span = Span{j.at("char_span").at(0).get<std::size_t>(),
                       j.at("char_span").at(1).get<std::size_t>()};
    s.word_count = j.at("word_count").get<int>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad sentence: ") + e.what());
  }
}

}  // namespace causalx
