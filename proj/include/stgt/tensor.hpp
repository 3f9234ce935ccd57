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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stgt/error.hpp"

namespace stgt {

/// Self-describing binary tensor container:
///   bytes 0..3   magic "STGT"
///   byte  4      format version (1)
///   bytes 5..8   uint32 little-endian header length
///   header       UTF-8 JSON: {"dtype":"float32","shape":[...],"role":...}
///                plus free-form string attributes
///   payload      row-major float32 little-endian values
struct Tensor {
  std::vector<std::int64_t> shape;
  std::string role;
  std::map<std::string, std::string> attrs;
  std::vector<float> data;

  std::int64_t element_count() const;
  void validate() const;
};

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace stgt
