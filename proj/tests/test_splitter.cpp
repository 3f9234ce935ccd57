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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stgt/rng.hpp"
#include "stgt/splitter.hpp"

using namespace stgt;

namespace {

SplitProblem random_problem(Rng& rng, int n, int na = 3, int no = 4,
                            int nh = 4) {
  SplitProblem p;
  for (int i = 0; i < n; ++i) {
    std::vector<double> a, o, h;
    for (int k = 0; k < na; ++k) a.push_back(double(rng.next_below(6)));
    for (int k = 0; k < no; ++k) o.push_back(double(rng.next_below(6)));
    for (int k = 0; k < nh; ++k) h.push_back(double(rng.next_below(4)));
    p.interactions.push_back(a);
    p.objects.push_back(o);
    p.heatmaps.push_back(h);
  }
  p.target_size = 2 + static_cast<int>(rng.next_below(
                          static_cast<std::uint64_t>(n - 1)));
  p.class_floors.assign(static_cast<std::size_t>(na), 0.0);
  p.class_floors[0] = double(rng.next_below(3));
  p.heatmap_floor = double(rng.next_below(3));
  return p;
}

// Independent enumerator used to vet solve_exact: iterates bitmasks instead
// of combinations.
SplitSolution enumerate_oracle(const SplitProblem& p) {
  int n = p.video_count();
  double best_z = std::numeric_limits<double>::infinity();
  std::vector<int> best_sel;
  bool found = false;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != p.target_size) continue;
    std::vector<int> sel;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) sel.push_back(i);
    }
    if (!check_feasible(p, sel).feasible()) continue;
    double z = split_objective(p, sel);
    if (z < best_z) {
      best_z = z;
      best_sel = sel;
      found = true;
    }
  }
  SplitSolution s;
  s.feasible = found;
  s.selected = best_sel;
  s.objective = found ? best_z : 0.0;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("splitter");

TEST_CASE("objective arithmetic") {
  SplitProblem p;
  p.interactions = {{2, 0}, {0, 0}};
  p.objects = {{1, 1}, {0, 0}};
  p.heatmaps = {{0, 0}, {0, 0}};
  p.target_size = 1;

  SUBCASE("hand-evaluated variance sum") {
    // Var(2,0) + Var(1,1) = 1 + 0 = 1.
    CHECK(split_objective(p, {0}) == doctest::Approx(1.0));
  }
  SUBCASE("uniform totals give zero") {
    SplitProblem q = p;
    q.interactions = {{3, 3}, {1, 1}};
    q.objects = {{2, 2}, {5, 5}};
    CHECK(split_objective(q, {0, 1}) == doctest::Approx(0.0));
  }
  SUBCASE("an all-zero video changes nothing") {
    CHECK(split_objective(p, {0, 1}) ==
          doctest::Approx(split_objective(p, {0})));
  }
  SUBCASE("permutation invariance") {
    SplitProblem q = p;
    q.target_size = 2;
    CHECK(split_objective(q, {0, 1}) ==
          doctest::Approx(split_objective(q, {1, 0})));
  }
  SUBCASE("empty selection is zero") {
    CHECK(split_objective(p, {}) == doctest::Approx(0.0));
  }
}

TEST_CASE("feasibility flags") {
  SplitProblem p;
  p.interactions = {{3, 0}, {2, 1}, {0, 5}};
  p.objects = {{1}, {1}, {1}};
  p.heatmaps = {{4, 0}, {0, 4}, {2, 2}};
  p.target_size = 2;
  p.class_floors = {5, 0};
  p.heatmap_floor = 0;

  SUBCASE("no floors, right size") {
    SplitProblem q = p;
    q.class_floors = {0, 0};
    CHECK(check_feasible(q, {0, 1}).feasible());
  }
  SUBCASE("class floor violation is reported per class") {
    auto f = check_feasible(p, {1, 2});  // class-0 total 2 < 5
    CHECK(f.size_ok);
    CHECK_FALSE(f.class_ok[0]);
    CHECK(f.class_ok[1]);
    CHECK_FALSE(f.feasible());
    CHECK(check_feasible(p, {0, 1}).class_ok[0]);  // total 5 >= 5
  }
  SUBCASE("empty selection fails the size constraint") {
    auto f = check_feasible(p, {});
    CHECK_FALSE(f.size_ok);
  }
  SUBCASE("heatmap floor counts the first half only") {
    SplitProblem q = p;
    q.class_floors = {0, 0};
    q.heatmap_floor = 5.0;
    CHECK_FALSE(check_feasible(q, {1, 2}).heatmap_ok);  // top halves 0 + 2
    CHECK(check_feasible(q, {0, 2}).heatmap_ok);        // 4 + 2
  }
}

TEST_CASE("solve_exact") {
  SUBCASE("three videos, unique best pair") {
    SplitProblem p;
    p.interactions = {{4, 0}, {0, 4}, {2, 2}};
    p.objects = {{0, 0}, {0, 0}, {0, 0}};
    p.heatmaps = {{1}, {1}, {1}};
    p.target_size = 2;
    // {0,1}: totals (4,4) -> var 0. {0,2}: (6,2) -> var 4. {1,2}: (2,6) -> 4.
    auto s = solve_exact(p);
    CHECK(s.feasible);
    CHECK(s.selected == std::vector<int>{0, 1});
    CHECK(s.objective == doctest::Approx(0.0));
  }
  SUBCASE("target equal to N returns the full set") {
    SplitProblem p;
    p.interactions = {{1}, {2}};
    p.objects = {{1}, {1}};
    p.heatmaps = {{1}, {1}};
    p.target_size = 2;
    auto s = solve_exact(p);
    CHECK(s.selected == std::vector<int>{0, 1});
  }
  SUBCASE("unsatisfiable floors are reported infeasible") {
    SplitProblem p;
    p.interactions = {{1}, {1}, {1}};
    p.objects = {{1}, {1}, {1}};
    p.heatmaps = {{1}, {1}, {1}};
    p.target_size = 2;
    p.class_floors = {100.0};
    auto s = solve_exact(p);
    CHECK_FALSE(s.feasible);
    CHECK_FALSE(s.flags.class_ok[0]);
    CHECK(static_cast<int>(s.selected.size()) == p.target_size);
  }
  SUBCASE("size guard") {
    Rng rng(1);
    SplitProblem p = random_problem(rng, 21);
    CHECK_THROWS_AS(solve_exact(p), SizeGuardError);
  }
  SUBCASE("agrees with the bitmask oracle, serial and parallel") {
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
      SplitProblem p = random_problem(rng, 4 + static_cast<int>(rng.next_below(7)));
      auto oracle = enumerate_oracle(p);
      auto serial = solve_exact(p, 1);
      auto parallel = solve_exact(p, 4);
      CHECK(serial.feasible == oracle.feasible);
      if (oracle.feasible) {
        CHECK(serial.objective == doctest::Approx(oracle.objective));
        CHECK(check_feasible(p, serial.selected).feasible());
      }
      CHECK(serial.selected == parallel.selected);
      CHECK(serial.objective == doctest::Approx(parallel.objective));
    }
  }
}

TEST_CASE("solve_heuristic") {
  SUBCASE("zero iterations returns the greedy construction") {
    Rng rng(9);
    SplitProblem p = random_problem(rng, 10);
    auto greedy = solve_heuristic(p, 3, 0);
    auto improved = solve_heuristic(p, 3, 25);
    CHECK(improved.objective <= greedy.objective + 1e-12);
    CHECK(static_cast<int>(greedy.selected.size()) == p.target_size);
  }
  SUBCASE("identical videos are all equivalent") {
    SplitProblem p;
    for (int i = 0; i < 6; ++i) {
      p.interactions.push_back({2, 1});
      p.objects.push_back({1, 3});
      p.heatmaps.push_back({1, 1});
    }
    p.target_size = 3;
    auto h = solve_heuristic(p, 0, 10);
    auto e = solve_exact(p);
    CHECK(h.objective == doctest::Approx(e.objective));
  }
  SUBCASE("deterministic for a fixed seed") {
    Rng rng(11);
    SplitProblem p = random_problem(rng, 12);
    auto a = solve_heuristic(p, 42, 15);
    auto b = solve_heuristic(p, 42, 15);
    CHECK(a.selected == b.selected);
    CHECK(a.objective == b.objective);
  }
  SUBCASE("never beaten by more than 10% on 45 of 50 small instances") {
    Rng rng(2024);
    int within = 0;
    int feasible_agreement = 0;
    for (int trial = 0; trial < 50; ++trial) {
      SplitProblem p = random_problem(rng, 6 + static_cast<int>(rng.next_below(7)));
      auto exact = solve_exact(p);
      auto heur = solve_heuristic(p, 7, 30);
      if (!exact.feasible) {
        ++feasible_agreement;
        ++within;  // nothing to compare against
        continue;
      }
      CHECK(heur.objective >= exact.objective - 1e-9);  // oracle dominance
      if (heur.feasible) {
        double gap = exact.objective > 0.0
                         ? (heur.objective - exact.objective) / exact.objective
                         : heur.objective;
        if (gap <= 0.10) ++within;
      }
      ++feasible_agreement;
    }
    CHECK(within >= 45);
    CHECK(feasible_agreement == 50);
  }
}

TEST_SUITE_END();
