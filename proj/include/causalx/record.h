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

// The four-feature hypothesis schema (cause, effect, direction, causality)
// together with the screening status of a candidate sentence.

#ifndef CAUSALX_RECORD_H_
#define CAUSALX_RECORD_H_

#include <optional>
#include <string>
#include <string_view>

#include "causalx/span.h"
#include "json.hpp"

namespace causalx {

enum class RecordStatus { kPending, kScreened, kAnnotated };
enum class Direction { kPositive, kNegative, kNonlinear };
enum class Causality { kCausal, kAssociative };

std::string_view ToString(RecordStatus status);
std::string_view ToString(Direction direction);
std::string_view ToString(Causality causality);

std::optional<RecordStatus> ParseRecordStatus(std::string_view s);
std::optional<Direction> ParseDirection(std::string_view s);
std::optional<Causality> ParseCausality(std::string_view s);

struct HypothesisRecord {
  std::string sentence_id;
  RecordStatus status = RecordStatus::kPending;
  std::optional<bool> is_hypothesis;
  std::optional<Span> node1_span;
  std::optional<Span> node2_span;
  std::optional<Direction> direction;
  std::optional<Causality> causality;
  std::string annotator;
  std::string timestamp;

  friend bool operator==(const HypothesisRecord&,
                         const HypothesisRecord&) = default;
};

// Unset optionals serialize as null; spans as [begin, end].
nlohmann::json ToJson(const HypothesisRecord& record);
// Throws Error(kFormat) on malformed input.
HypothesisRecord RecordFromJson(const nlohmann::json& j);

}  // namespace causalx

#endif  // CAUSALX_RECORD_H_
