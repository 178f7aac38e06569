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

#include "causalx/record.h"

#include "causalx/error.h"

namespace causalx {

using nlohmann::json;

std::string_view ToString(RecordStatus status) {
  switch (status) {
    case RecordStatus::kPending: return "pending";
    case RecordStatus::kScreened: return "screened";
    case RecordStatus::kAnnotated: return "annotated";
  }
  return "pending";
}

std::string_view ToString(Direction direction) {
  switch (direction) {
    case Direction::kPositive: return "positive";
    case Direction::kNegative: return "negative";
    case Direction::kNonlinear: return "nonlinear";
  }
  return "positive";
}

std::string_view ToString(Causality causality) {
  return causality == Causality::kCausal ? "causal" : "associative";
}

std::optional<RecordStatus> ParseRecordStatus(std::string_view s) {
  if (s == "pending") return RecordStatus::kPending;
  if (s == "screened") return RecordStatus::kScreened;
  if (s == "annotated") return RecordStatus::kAnnotated;
  return std::nullopt;
}

std::optional<Direction> ParseDirection(std::string_view s) {
  if (s == "positive" || s == "+") return Direction::kPositive;
  if (s == "negative" || s == "-") return Direction::kNegative;
  if (s == "nonlinear") return Direction::kNonlinear;
  return std::nullopt;
}

std::optional<Causality> ParseCausality(std::string_view s) {
  if (s == "causal") return Causality::kCausal;
  if (s == "associative") return Causality::kAssociative;
  return std::nullopt;
}

namespace {

json SpanToJson(const std::optional<Span>& span) {
  if (!span) return nullptr;
  return json::array({span->begin, span->end});
}

std::optional<Span> SpanFromJson(const json& j, const char* field) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned()) {
    throw Error(ErrorCode::kFormat,
                std::string(field) + " must be [begin, end] or null");
  }
  return Span{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

template <typename Enum, typename Parser>
std::optional<Enum> EnumFromJson(const json& j, const char* field,
                                 Parser parse) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_string()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be a string");
  }
  auto value = parse(j.get<std::string>());
  if (!value) {
    throw Error(ErrorCode::kFormat, std::string("bad ") + field + " value '" +
                                        j.get<std::string>() + "'");
  }
  return value;
}

const json& Field(const json& j, const char* name) {
  static const json kNull = nullptr;
  auto it = j.find(name);
  return it == j.end() ? kNull : *it;
}

}  // namespace

json ToJson(const HypothesisRecord& record) {
  json j;
  j["sentence_id"] = record.sentence_id;
  j["status"] = ToString(record.status);
  j["is_hypothesis"] =
      record.is_hypothesis ? json(*record.is_hypothesis) : json(nullptr);
  j["node1_span"] = SpanToJson(record.node1_span);
  j["node2_span"] = SpanToJson(record.node2_span);
  j["direction"] =
      record.direction ? json(ToString(*record.direction)) : json(nullptr);
  j["causality"] =
      record.causality ? json(ToString(*record.causality)) : json(nullptr);
  j["annotator"] = record.annotator;
  j["timestamp"] = record.timestamp;
  return j;
}

HypothesisRecord RecordFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "record must be object");
  HypothesisRecord r;
  const json& id = Field(j, "sentence_id");
  if (!id.is_string()) throw Error(ErrorCode::kFormat, "sentence_id missing");
  r.sentence_id = id.get<std::string>();
  auto status = EnumFromJson<RecordStatus>(Field(j, "status"), "status",
                                           ParseRecordStatus);
  if (!status) throw Error(ErrorCode::kFormat, "status missing");
  r.status = *status;
  const json& hyp = Field(j, "is_hypothesis");
  if (!hyp.is_null()) {
    if (!hyp.is_boolean()) {
      throw Error(ErrorCode::kFormat, "is_hypothesis must be boolean");
    }
    r.is_hypothesis = hyp.get<bool>();
  }
  r.node1_span = SpanFromJson(Field(j, "node1_span"), "node1_span");
  r.node2_span = SpanFromJson(Field(j, "node2_span"), "node2_span");
  r.direction = EnumFromJson<Direction>(Field(j, "direction"), "direction",
                                        ParseDirection);
  r.causality = EnumFromJson<Causality>(Field(j, "causality"), "causality",
                                        ParseCausality);
  if (const json& a = Field(j, "annotator"); a.is_string()) {
    r.annotator = a.get<std::string>();
  }
  if (const json& t = Field(j, "timestamp"); t.is_string()) {
    r.timestamp = t.get<std::string>();
  }
  return r;
}

}  // namespace causalx
