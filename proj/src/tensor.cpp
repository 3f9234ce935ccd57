// Copyright 2026 The stgt Authors
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

#include "stgt/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace stgt {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'G', 'T'};
constexpr std::uint8_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "tensor i/o assumes a little-endian host");

}  // namespace

std::int64_t Tensor::element_count() const {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

void Tensor::validate() const {
  if (shape.empty()) {
    throw DimensionError("tensor must have at least one dimension");
  }
  for (std::int64_t d : shape) {
    if (d <= 0) throw DimensionError("tensor dimensions must be positive");
  }
  if (static_cast<std::int64_t>(data.size()) != element_count()) {
    throw DimensionError("tensor payload does not match its shape");
  }
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  t.validate();
  nlohmann::json header;
  header["dtype"] = "float32";
  header["shape"] = t.shape;
  header["role"] = t.role;
  for (const auto& [k, v] : t.attrs) header[k] = v;
  std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  out.put(static_cast<char>(kVersion));
  std::uint32_t len = static_cast<std::uint32_t>(header_text.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!out) throw IoError("failed writing tensor: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ValidationError(path.string(), "bad magic, not a tensor file");
  }
  int version = in.get();
  if (version != kVersion) {
    throw ValidationError(path.string(),
                          "unsupported tensor version " + std::to_string(version));
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  if (!in) throw ValidationError(path.string(), "truncated tensor header");
  std::string header_text(len, '\0');
  in.read(header_text.data(), len);
  if (!in) throw ValidationError(path.string(), "truncated tensor header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string(), std::string("bad header: ") + e.what());
  }
  if (header.value("dtype", "") != "float32") {
    throw ValidationError(path.string(), "unsupported dtype");
  }

  Tensor t;
  t.shape = header.at("shape").get<std::vector<std::int64_t>>();
  t.role = header.value("role", "");
  for (const auto& [k, v] : header.items()) {
    if (k == "dtype" || k == "shape" || k == "role") continue;
    if (v.is_string()) t.attrs[k] = v.get<std::string>();
  }
  std::int64_t count = t.element_count();
  if (count <= 0) throw ValidationError(path.string(), "bad tensor shape");
  t.data.resize(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!in) throw ValidationError(path.string(), "truncated tensor payload");
  return t;
}

}  // namespace stgt
