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

#include "causalx/error.h"

#include <utility>

namespace causalx {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kInvalidUtf8: return "InvalidUtf8";
    case ErrorCode::kInvalidNgramOrder: return "InvalidNgramOrder";
    case ErrorCode::kInvalidSpan: return "InvalidSpan";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kClassifierError: return "ClassifierError";
    case ErrorCode::kLabelAlignmentError: return "LabelAlignmentError";
    case ErrorCode::kStratificationError: return "StratificationError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kInvalidJudgment: return "InvalidJudgment";
    case ErrorCode::kEmptyExport: return "EmptyExport";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(ErrorName(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace causalx
