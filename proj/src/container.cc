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

#include "causalx/container.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causalx/error.h"

namespace causalx {

using nlohmann::json;

namespace {

void PutU32(std::uint32_t v, std::ostream& out) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorCode::kFormat, "truncated container");
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

const Matrix& Container::Get(std::string_view name) const {
  for (const NamedMatrix& m : matrices) {
    if (m.name == name) return m.value;
  }
  throw Error(ErrorCode::kFormat,
              "container has no matrix '" + std::string(name) + "'");
}

void QuantizeToFloat(Matrix* m) { *m = m->cast<float>().cast<double>(); }
void QuantizeToFloat(Vector* v) { *v = v->cast<float>().cast<double>(); }

void WriteContainer(const Container& container, std::ostream& out) {
  json header = container.header;
  json entries = json::array();
  for (const NamedMatrix& m : container.matrices) {
    entries.push_back(
        {{"name", m.name}, {"rows", m.value.rows()}, {"cols", m.value.cols()}});
  }
  header["matrices"] = entries;
  const std::string text = header.dump();
  out.write(kContainerMagic.data(), kContainerMagic.size());
  PutU32(static_cast<std::uint32_t>(text.size()), out);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const NamedMatrix& m : container.matrices) {
    const Eigen::Index count = m.value.size();
    const double* data = m.value.data();
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data[i]));
      PutU32(bits, out);
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing container");
}

std::string SerializeContainer(const Container& container) {
  std::ostringstream out(std::ios::binary);
  WriteContainer(container, out);
  return out.str();
}

Container ReadContainer(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) ||
      std::string_view(magic, 4) != kContainerMagic) {
    throw Error(ErrorCode::kFormat, "not a CKE1 container");
  }
  const std::uint32_t header_len = GetU32(in);
  std::string text(header_len, '\0');
  if (!in.read(text.data(), header_len)) {
    throw Error(ErrorCode::kFormat, "truncated container header");
  }
  Container c;
  try {
    c.header = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad header JSON: ") + e.what());
  }
  if (!c.header.contains("matrices") || !c.header["matrices"].is_array()) {
    throw Error(ErrorCode::kFormat, "container header lacks matrices");
  }
  for (const json& entry : c.header["matrices"]) {
    NamedMatrix m;
    m.name = entry.at("name").get<std::string>();
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    m.value.resize(rows, cols);
    double* data = m.value.data();
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      data[i] = std::bit_cast<float>(GetU32(in));
    }
    c.matrices.push_back(std::move(m));
  }
  return c;
}

Container ParseContainer(std::string_view bytes) {
  std::istringstream in(std::string(bytes), std::ios::binary);
  return ReadContainer(in);
}

void SaveContainer(const Container& container, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  WriteContainer(container, out);
}

Container LoadContainer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadContainer(in);
}

}  // namespace causalx
