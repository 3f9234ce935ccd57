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

#include "stgt/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stgt/parallel.hpp"
#include "stgt/rng.hpp"

namespace stgt {

void SplitProblem::validate() const {
  int n = video_count();
  if (n == 0) throw ConfigurationError("split problem has no videos");
  if (static_cast<int>(objects.size()) != n ||
      static_cast<int>(heatmaps.size()) != n) {
    throw DimensionError("per-video histogram lists must have equal length");
  }
  if (target_size <= 0 || target_size > n) {
    throw ConfigurationError("target size must lie in (0, N]");
  }
  std::size_t na = interactions[0].size();
  std::size_t no = objects[0].size();
  std::size_t nh = heatmaps[0].size();
  for (int i = 0; i < n; ++i) {
    if (interactions[i].size() != na || objects[i].size() != no ||
        heatmaps[i].size() != nh) {
      throw DimensionError("histogram lengths differ between videos");
    }
  }
  if (!class_floors.empty() && class_floors.size() != na) {
    throw DimensionError("class floors must match the interaction histogram");
  }
  for (const auto* rows : {&interactions, &objects, &heatmaps}) {
    for (const auto& row : *rows) {
      for (double v : row) {
        if (v < 0.0 || !std::isfinite(v)) {
          throw ConfigurationError("histogram counts must be non-negative");
        }
      }
    }
  }
}

namespace {

double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return sq / v.size();
}

std::vector<double> summed(const std::vector<std::vector<double>>& rows,
                           const std::vector<int>& selected) {
  if (rows.empty()) return {};
  std::vector<double> total(rows[0].size(), 0.0);
  for (int i : selected) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < row.size(); ++k) total[k] += row[k];
  }
  return total;
}

double top_half_sum(const std::vector<double>& heatmap) {
  std::size_t half = heatmap.size() / 2;
  return std::accumulate(heatmap.begin(), heatmap.begin() + half, 0.0);
}

struct Totals {
  std::vector<double> interactions;
  std::vector<double> objects;
  double top_half = 0.0;

  explicit Totals(const SplitProblem& p)
      : interactions(p.interactions[0].size(), 0.0),
        objects(p.objects[0].size(), 0.0) {}

  void add(const SplitProblem& p, int i, double sign) {
    for (std::size_t k = 0; k < interactions.size(); ++k) {
      interactions[k] += sign * p.interactions[i][k];
    }
    for (std::size_t k = 0; k < objects.size(); ++k) {
      objects[k] += sign * p.objects[i][k];
    }
    std::size_t half = p.heatmaps[i].size() / 2;
    for (std::size_t k = 0; k < half; ++k) top_half += sign * p.heatmaps[i][k];
  }

  double objective() const {
    return population_variance(interactions) + population_variance(objects);
  }

  /// Sum of outstanding floor deficits; zero when all floors are met.
  double total_deficit(const SplitProblem& p) const {
    double d = 0.0;
    for (std::size_t j = 0; j < p.class_floors.size(); ++j) {
      d += std::max(0.0, p.class_floors[j] - interactions[j]);
    }
    d += std::max(0.0, p.heatmap_floor - top_half);
    return d;
  }
};

}  // namespace

bool SplitFeasibility::feasible() const {
  if (!size_ok || !heatmap_ok) return false;
  return std::all_of(class_ok.begin(), class_ok.end(),
                     [](bool b) { return b; });
}

double split_objective(const SplitProblem& p,
                       const std::vector<int>& selected) {
  return population_variance(summed(p.interactions, selected)) +
         population_variance(summed(p.objects, selected));
}

SplitFeasibility check_feasible(const SplitProblem& p,
                                const std::vector<int>& selected) {
  SplitFeasibility f;
  f.size_ok = static_cast<int>(selected.size()) == p.target_size;
  auto ia = summed(p.interactions, selected);
  f.class_ok.resize(p.class_floors.size(), true);
  for (std::size_t j = 0; j < p.class_floors.size(); ++j) {
    f.class_ok[j] = ia[j] >= p.class_floors[j];
  }
  auto hm = summed(p.heatmaps, selected);
  f.heatmap_ok = top_half_sum(hm) >= p.heatmap_floor;
  return f;
}

namespace {

SplitSolution make_solution(const SplitProblem& p, std::vector<int> selected) {
  SplitSolution s;
  std::sort(selected.begin(), selected.end());
  s.selected = std::move(selected);
  s.objective = split_objective(p, s.selected);
  s.flags = check_feasible(p, s.selected);
  s.feasible = s.flags.feasible();
  return s;
}

struct EnumBest {
  double z = std::numeric_limits<double>::infinity();
  std::vector<int> selected;
  bool found = false;
};

// Enumerates all target-size subsets whose smallest element is `first`,
// in lexicographic order.
void enumerate_with_first(const SplitProblem& p, int first, EnumBest& feasible,
                          EnumBest& any) {
  int n = p.video_count();
  int k = p.target_size;
  std::vector<int> combo(k);
  combo[0] = first;
  for (int i = 1; i < k; ++i) combo[i] = first + i;
  if (combo.back() >= n) return;
  for (;;) {
    double z = split_objective(p, combo);
    if (z < any.z) {
      any.z = z;
      any.selected = combo;
      any.found = true;
    }
    if (z < feasible.z && check_feasible(p, combo).feasible()) {
      feasible.z = z;
      feasible.selected = combo;
      feasible.found = true;
    }
    // Advance to the next combination keeping combo[0] fixed.
    int i = k - 1;
    while (i >= 1 && combo[i] == n - (k - i)) --i;
    if (i < 1) break;
    ++combo[i];
    for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
}

}  // namespace

SplitSolution solve_exact(const SplitProblem& p, int threads) {
  p.validate();
  int n = p.video_count();
  if (n > 20) {
    throw SizeGuardError("exact solver is limited to 20 videos");
  }
  int prefixes = n - p.target_size + 1;
  std::vector<EnumBest> feas(prefixes), any(prefixes);
  parallel_for(static_cast<std::size_t>(prefixes), threads, [&](std::size_t i) {
    enumerate_with_first(p, static_cast<int>(i), feas[i], any[i]);
  });
  // Merge in prefix order; strict < keeps the lexicographically first
  // subset among ties (within a prefix the enumeration order already does).
  EnumBest best_feasible, best_any;
  for (int i = 0; i < prefixes; ++i) {
    if (feas[i].found && feas[i].z < best_feasible.z) best_feasible = feas[i];
    if (any[i].found && any[i].z < best_any.z) best_any = any[i];
  }
  if (best_feasible.found) return make_solution(p, best_feasible.selected);
  return make_solution(p, best_any.selected);  // explicit infeasible result
}

SplitSolution solve_heuristic(const SplitProblem& p, std::uint64_t seed,
                              int iterations) {
  p.validate();
  if (iterations < 0) {
    throw ConfigurationError("iterations must be non-negative");
  }
  int n = p.video_count();
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  std::vector<int> selected;
  Totals totals(p);

  // Greedy construction. While a floor is violated, add the video that most
  // reduces the most-violated floor; otherwise add the video that minimizes
  // the objective of the grown selection.
  while (static_cast<int>(selected.size()) < p.target_size) {
    int deficit_class = -1;  // -1 none, N_a for the heatmap floor
    double worst = 0.0;
    for (std::size_t j = 0; j < p.class_floors.size(); ++j) {
      double d = p.class_floors[j] - totals.interactions[j];
      if (d > worst) {
        worst = d;
        deficit_class = static_cast<int>(j);
      }
    }
    double heat_deficit = p.heatmap_floor - totals.top_half;
    if (heat_deficit > worst) {
      worst = heat_deficit;
      deficit_class = static_cast<int>(p.class_floors.size());
    }

    int pick = -1;
    double best_gain = -1.0;
    double best_z = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (in[static_cast<std::size_t>(i)]) continue;
      double gain = 0.0;
      if (deficit_class >= 0) {
        gain = deficit_class < static_cast<int>(p.class_floors.size())
                   ? p.interactions[i][static_cast<std::size_t>(deficit_class)]
                   : top_half_sum(p.heatmaps[i]);
      }
      totals.add(p, i, 1.0);
      double z = totals.objective();
      totals.add(p, i, -1.0);
      if (gain > best_gain || (gain == best_gain && z < best_z)) {
        best_gain = gain;
        best_z = z;
        pick = i;
      }
    }
    in[static_cast<std::size_t>(pick)] = true;
    selected.push_back(pick);
    totals.add(p, pick, 1.0);
  }

  // Iterated 1-swap local search. Each descent pass scans the (out, in)
  // swaps in a seeded random order and accepts only moves that strictly
  // lower the objective without increasing the total floor deficit, so the
  // incumbent objective is monotone. Leftover passes fund perturbation
  // restarts; a perturbed solution replaces the incumbent only when its
  // descended objective is strictly better.
  Rng rng(seed);
  struct State {
    std::vector<bool> in;
    double z = 0.0;
    double deficit = 0.0;
  };

  auto descend = [&](State& s, Totals& t, int max_passes) {
    int used = 0;
    for (; used < max_passes; ++used) {
      std::vector<std::pair<int, int>> swaps;
      for (int out = 0; out < n; ++out) {
        if (!s.in[static_cast<std::size_t>(out)]) continue;
        for (int add = 0; add < n; ++add) {
          if (!s.in[static_cast<std::size_t>(add)]) swaps.emplace_back(out, add);
        }
      }
      rng.shuffle(swaps);
      bool improved = false;
      for (auto [out, add] : swaps) {
        if (!s.in[static_cast<std::size_t>(out)] ||
            s.in[static_cast<std::size_t>(add)]) {
          continue;  // stale after an accepted swap
        }
        t.add(p, out, -1.0);
        t.add(p, add, 1.0);
        double new_z = t.objective();
        double new_deficit = t.total_deficit(p);
        if (new_z < s.z && new_deficit <= s.deficit) {
          s.in[static_cast<std::size_t>(out)] = false;
          s.in[static_cast<std::size_t>(add)] = true;
          s.z = new_z;
          s.deficit = new_deficit;
          improved = true;
        } else {
          t.add(p, add, -1.0);
          t.add(p, out, 1.0);
        }
      }
      if (!improved) {
        ++used;
        break;
      }
    }
    return used;
  };

  State best{in, totals.objective(), totals.total_deficit(p)};
  int budget = iterations;
  if (budget > 0) {
    Totals t = totals;
    budget -= descend(best, t, budget);
  }
  while (budget > 0 && n > p.target_size && p.target_size > 0) {
    // Perturb: force two random swaps, then descend the copy.
    State trial = best;
    Totals t(p);
    for (int i = 0; i < n; ++i) {
      if (trial.in[static_cast<std::size_t>(i)]) t.add(p, i, 1.0);
    }
    for (int kick = 0; kick < 2; ++kick) {
      std::vector<int> ins, outs;
      for (int i = 0; i < n; ++i) {
        (trial.in[static_cast<std::size_t>(i)] ? ins : outs).push_back(i);
      }
      if (ins.empty() || outs.empty()) break;
      int out = ins[rng.next_below(ins.size())];
      int add = outs[rng.next_below(outs.size())];
      trial.in[static_cast<std::size_t>(out)] = false;
      trial.in[static_cast<std::size_t>(add)] = true;
      t.add(p, out, -1.0);
      t.add(p, add, 1.0);
    }
    trial.z = t.objective();
    trial.deficit = t.total_deficit(p);
    budget -= descend(trial, t, budget);
    if (trial.deficit <= best.deficit && trial.z < best.z) {
      best = trial;
    }
  }

  std::vector<int> final_sel;
  for (int i = 0; i < n; ++i) {
    if (best.in[static_cast<std::size_t>(i)]) final_sel.push_back(i);
  }
  return make_solution(p, final_sel);
}

}  // namespace stgt
