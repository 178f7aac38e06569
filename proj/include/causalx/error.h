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

#ifndef CAUSALX_ERROR_H_
#define CAUSALX_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalx {

enum class ErrorCode {
  kEmptyDocument,
  kEmptyCorpus,
  kInvalidUtf8,
  kInvalidNgramOrder,
  kInvalidSpan,
  kInvalidArgument,
  kEmptyInput,
  kUnknownLabel,
  kDegenerateDataset,
  kDimensionMismatch,
  kClassifierError,
  kLabelAlignmentError,
  kStratificationError,
  kLengthMismatch,
  kNotFound,
  kInvalidJudgment,
  kEmptyExport,
  kFormat,
  kIo,
};

// Stable name used in CLI messages and HTTP error bodies.
std::string_view ErrorName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace causalx

#endif  // CAUSALX_ERROR_H_
