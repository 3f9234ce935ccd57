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
#include <vector>

#include "stgt/error.hpp"

namespace stgt {

/// Inputs of the test-set video selection program: per-video interaction and
/// object histograms, the location heatmap, the target size, and the floor
/// constraints. The heatmap floor applies to the summed first half of the
/// heatmap entries (the top half of the frame).
struct SplitProblem {
  std::vector<std::vector<double>> interactions;  // N x N_a
  std::vector<std::vector<double>> objects;       // N x N_o
  std::vector<std::vector<double>> heatmaps;      // N x N_h
  int target_size = 0;                            // N_t
  std::vector<double> class_floors;               // alpha_j, length N_a
  double heatmap_floor = 0.0;                     // gamma_split

  int video_count() const { return static_cast<int>(interactions.size()); }
  void validate() const;
};

struct SplitFeasibility {
  bool size_ok = false;
  std::vector<bool> class_ok;
  bool heatmap_ok = false;

  bool feasible() const;
};

/// Population variance of the summed interaction histogram plus population
/// variance of the summed object histogram over the selection.
double split_objective(const SplitProblem& p, const std::vector<int>& selected);

SplitFeasibility check_feasible(const SplitProblem& p,
                                const std::vector<int>& selected);

struct SplitSolution {
  std::vector<int> selected;  // sorted video indices
  double objective = 0.0;
  SplitFeasibility flags;
  bool feasible = false;
};

/// Globally optimal selection by exhaustive enumeration; guarded to N <= 20
/// videos. When no subset satisfies the floors, returns the best selection
/// under the size constraint alone, flagged infeasible.
SplitSolution solve_exact(const SplitProblem& p, int threads = 1);

/// Greedy construction with constraint repair followed by 1-swap local
/// search. Deterministic for a fixed seed; the result never has a larger
/// objective than the greedy start.
SplitSolution solve_heuristic(const SplitProblem& p, std::uint64_t seed = 0,
                              int iterations = 20);

}  // namespace stgt
