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

#include "stgt/config.hpp"

namespace stgt {

/// Knobs for the synthetic desk-scale dataset generator. Scenes are
/// deterministic in the seed: rectangular humans and objects, candidate
/// masks with depth, a context map whose channels align each instance's
/// ground-truth mask with its query vector (so a run over oracle features
/// grounds perfectly), and point clouds consistent with the boxes.
struct FixtureSpec {
  std::uint64_t seed = 7;
  int videos = 2;
  int instances = 4;    // total, distributed round-robin over videos
  int frames = 3;       // keyframes per instance, 1-second stride
  int distractors = 2;  // extra masks per instance per keyframe
  bool adversarial = false;  // queries orthogonal to the GT mask channel
  bool with_depth = true;
  bool with_clouds = true;
};

/// Writes a complete dataset directory (manifest, annotations, candidates,
/// features, queries, clouds). Byte-identical for identical specs.
void generate_fixture(const std::filesystem::path& root,
                      const FixtureSpec& spec, const RunConfig& cfg);

}  // namespace stgt
