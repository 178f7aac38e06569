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

// CKE1 model container: the 4-byte magic "CKE1", a little-endian uint32
// header length, a UTF-8 JSON header, then every matrix declared in the
// header's "matrices" list as row-major little-endian float32.

#ifndef CAUSALX_CONTAINER_H_
#define CAUSALX_CONTAINER_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace causalx {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr std::string_view kContainerMagic = "CKE1";

struct NamedMatrix {
  std::string name;
  Matrix value;
};

struct Container {
  nlohmann::json header;  // "matrices" is filled in by WriteContainer
  std::vector<NamedMatrix> matrices;

  const Matrix& Get(std::string_view name) const;
};

// Rounds every entry to the nearest float32 so that parameters survive a
// save/load cycle unchanged.
void QuantizeToFloat(Matrix* m);
void QuantizeToFloat(Vector* v);

void WriteContainer(const Container& container, std::ostream& out);
std::string SerializeContainer(const Container& container);
Container ReadContainer(std::istream& in);
Container ParseContainer(std::string_view bytes);

void SaveContainer(const Container& container, const std::string& path);
Container LoadContainer(const std::string& path);

}  // namespace causalx

#endif  // CAUSALX_CONTAINER_H_
