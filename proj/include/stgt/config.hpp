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

#include <filesystem>
#include <string>
#include <vector>

#include "stgt/grounding.hpp"
#include "stgt/layout4d.hpp"
#include "stgt/metrics.hpp"

namespace stgt {

/// Hard cap on candidate masks per keyframe.
constexpr int kMaskCap = 255;

struct RunConfig {
  FusionConfig fusion;
  BpsConfig bps;
  std::vector<double> iou_thresholds{0.5, 0.6, 0.7, 0.8, 0.9};
  IouAggregation aggregation = IouAggregation::Mean;
  PoolMode pool_mode = PoolMode::ForegroundMean;
  int feature_dim = 32;   // D of context maps and query vectors
  int max_masks = 256;    // N_o; values above kMaskCap are clipped
  int num_queries = 24;   // N_q
  int num_3d_slots = 256; // N_3D feature slots per clip
  double pos_weight = 10.0;

  /// N_o clipped to the hard cap, warning when clipping applies.
  int effective_mask_cap(std::vector<std::string>* warnings = nullptr) const;
  void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

std::string pool_mode_name(PoolMode mode);
PoolMode pool_mode_from_name(const std::string& name);
std::string aggregation_name(IouAggregation agg);
IouAggregation aggregation_from_name(const std::string& name);

}  // namespace stgt
