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

#include "causalx/datasets.h"

#include <fstream>
#include <sstream>

#include "causalx/error.h"
#include "causalx/features.h"

namespace causalx {

using nlohmann::json;

namespace {

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : SplitOn(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string Field(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

Direction DirectionOrThrow(std::string_view s) {
  auto d = ParseDirection(s);
  if (!d) throw Error(ErrorCode::kFormat, "bad direction '" + std::string(s) + "'");
  return *d;
}

json SpanJson(const Span& s) { return json::array({s.begin, s.end}); }

Span SpanFrom(const json& j) {
  return Span{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

}  // namespace

json ToJson(const TextExample& e) {
  return json{{"task", "hypothesis"},
              {"text", e.text},
              {"label", e.label},
              {"sentence_id", e.sentence_id}};
}

json ToJson(const CausalityExample& e) {
  return json{{"task", "causality"},
              {"text", e.masked},
              {"label", e.label},
              {"sentence", e.sentence},
              {"node1_span", SpanJson(e.node1_span)},
              {"node2_span", SpanJson(e.node2_span)},
              {"direction", e.direction ? json(ToString(*e.direction))
                                        : json(nullptr)},
              {"sentence_id", e.sentence_id}};
}

json ToJson(const TaggingExample& e) {
  return json{{"task", "tagging"},
              {"tokens", e.tokens},
              {"labels", e.labels},
              {"sentence_id", e.sentence_id}};
}

std::string ToJsonl(const LabeledCorpus& corpus) {
  std::string out;
  for (const auto& e : corpus.hypothesis) out += ToJson(e).dump() + "\n";
  for (const auto& e : corpus.causality) out += ToJson(e).dump() + "\n";
  for (const auto& e : corpus.tagging) out += ToJson(e).dump() + "\n";
  return out;
}

LabeledCorpus ParseJsonl(std::string_view text) {
  LabeledCorpus corpus;
  std::size_t line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      const std::string task = j.at("task").get<std::string>();
      const std::string id = j.value("sentence_id", "");
      if (task == "hypothesis") {
        corpus.hypothesis.push_back(TextExample{
            j.at("text").get<std::string>(), j.at("label").get<std::string>(),
            id});
      } else if (task == "causality") {
        CausalityExample e;
        e.masked = j.at("text").get<std::string>();
        e.label = j.at("label").get<std::string>();
        e.sentence = j.value("sentence", "");
        if (j.contains("node1_span")) e.node1_span = SpanFrom(j["node1_span"]);
        if (j.contains("node2_span")) e.node2_span = SpanFrom(j["node2_span"]);
        if (j.contains("direction") && j["direction"].is_string()) {
          e.direction = DirectionOrThrow(j["direction"].get<std::string>());
        }
        e.sentence_id = id;
        corpus.causality.push_back(std::move(e));
      } else if (task == "tagging") {
        TaggingExample e{j.at("tokens").get<std::vector<std::string>>(),
                         j.at("labels").get<std::vector<int>>(), id};
        if (e.tokens.size() != e.labels.size()) {
          throw Error(ErrorCode::kFormat, "tokens and labels differ in length");
        }
        corpus.tagging.push_back(std::move(e));
      } else {
        throw Error(ErrorCode::kFormat, "unknown task '" + task + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return corpus;
}

std::string HypothesisTsv(const std::vector<TextExample>& rows) {
  std::string out;
  for (const auto& r : rows) out += Field(r.text) + "\t" + r.label + "\n";
  return out;
}

std::string CausalityTsv(const std::vector<CausalityExample>& rows) {
  std::string out;
  for (const auto& r : rows) {
    const std::string_view s = r.sentence;
    out += Field(s) + "\t" +
           Field(s.substr(r.node1_span.begin, r.node1_span.size())) + "\t" +
           Field(s.substr(r.node2_span.begin, r.node2_span.size())) + "\t" +
           (r.direction ? std::string(ToString(*r.direction)) : "") + "\t" +
           r.label + "\n";
  }
  return out;
}

std::string TaggingTsv(const std::vector<TaggingExample>& rows) {
  std::string out;
  for (const auto& r : rows) {
    std::vector<std::string> tags;
    for (int t : r.labels) tags.push_back(std::to_string(t));
    out += Join(r.tokens) + "\t" + Join(tags) + "\n";
  }
  return out;
}

std::vector<TextExample> ParseHypothesisTsv(std::string_view text) {
  std::vector<TextExample> out;
  for (std::string_view line : Lines(text)) {
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 2) throw Error(ErrorCode::kFormat, "expected 2 columns");
    out.push_back(TextExample{std::string(cols[0]), std::string(cols[1]), ""});
  }
  return out;
}

std::vector<CausalityExample> ParseCausalityTsv(std::string_view text) {
  std::vector<CausalityExample> out;
  for (std::string_view line : Lines(text)) {
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 5) throw Error(ErrorCode::kFormat, "expected 5 columns");
    CausalityExample e;
    e.sentence = std::string(cols[0]);
    const std::size_t n1 = e.sentence.find(cols[1]);
    if (cols[1].empty() || n1 == std::string::npos) {
      throw Error(ErrorCode::kFormat, "node1 not found in sentence");
    }
    e.node1_span = Span{n1, n1 + cols[1].size()};
    std::size_t n2 = e.sentence.find(cols[2]);
    while (n2 != std::string::npos &&
           Span{n2, n2 + cols[2].size()}.Overlaps(e.node1_span)) {
      n2 = e.sentence.find(cols[2], n2 + 1);
    }
    if (cols[2].empty() || n2 == std::string::npos) {
      throw Error(ErrorCode::kFormat, "node2 not found in sentence");
    }
    e.node2_span = Span{n2, n2 + cols[2].size()};
    if (!cols[3].empty()) e.direction = DirectionOrThrow(cols[3]);
    e.label = std::string(cols[4]);
    e.masked = MaskNodes(e.sentence, e.node1_span, e.node2_span);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TaggingExample> ParseTaggingTsv(std::string_view text) {
  std::vector<TaggingExample> out;
  for (std::string_view line : Lines(text)) {
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 2) throw Error(ErrorCode::kFormat, "expected 2 columns");
    TaggingExample e;
    for (std::string_view t : SplitOn(cols[0], ' ')) {
      if (!t.empty()) e.tokens.emplace_back(t);
    }
    for (std::string_view t : SplitOn(cols[1], ' ')) {
      if (t.empty()) continue;
      if (t != "0" && t != "1" && t != "2") {
        throw Error(ErrorCode::kFormat, "tag must be 0, 1 or 2");
      }
      e.labels.push_back(t[0] - '0');
    }
    if (e.tokens.size() != e.labels.size()) {
      throw Error(ErrorCode::kFormat, "tokens and tags differ in length");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<int> TagsFromSpans(std::string_view sentence, Span node1,
                               Span node2, std::vector<std::string>* tokens) {
  const std::vector<Token> toks = Tokenize(sentence);
  std::vector<int> tags;
  tags.reserve(toks.size());
  tokens->clear();
  for (const Token& t : toks) {
    tokens->push_back(t.surface);
    if (t.char_span.Overlaps(node1)) {
      tags.push_back(1);
    } else if (t.char_span.Overlaps(node2)) {
      tags.push_back(2);
    } else {
      tags.push_back(0);
    }
  }
  return tags;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace causalx
