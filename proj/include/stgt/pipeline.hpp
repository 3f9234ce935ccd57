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

#include "stgt/dataset.hpp"

namespace stgt {

struct PipelineResult {
  std::vector<Tracklet> predictions;
  EvalReport report;
  int failed_instances = 0;
  std::string mode;  // "with-depth" or "2d-only", "+giou-only" without features
  std::vector<std::string> diagnostics;
};

/// Grounds every annotated instance: pools mask features from the context
/// map, scores them against each query, unions the per-query selections and
/// emits the generated boxes as prediction tracklets, then evaluates against
/// the dataset's ground truth. Per-instance failures are logged and counted,
/// never abort the batch. Output is identical for any thread count.
PipelineResult run_pipeline(const Dataset& ds, const RunConfig& cfg,
                            int threads = 1);

/// Grid search over fusion parameters; each cell runs the full pipeline on
/// the dataset and is scored by mAP at the first configured IoU threshold
/// (0.5 with default thresholds).
GridSearchResult tune(const Dataset& ds, const RunConfig& base,
                      const GridSpec& grid, int threads = 1);

}  // namespace stgt
