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

#include <filesystem>
#include <fstream>

#include "stgt/dataset.hpp"
#include "stgt/rng.hpp"
#include "stgt/tensor.hpp"

using namespace stgt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stgt_io_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("interaction class list") {
  CHECK(interaction_classes().size() == 51);
  CHECK(is_interaction_class("ride"));
  CHECK(is_interaction_class("text on/look at a cellphone"));
  CHECK_FALSE(is_interaction_class("fly"));
}

TEST_CASE("tensor round trip") {
  TempDir dir;
  Tensor t;
  t.shape = {2, 3};
  t.role = "query";
  t.attrs["variant"] = "norms";
  t.data = {1.0f, 2.5f, -3.0f, 0.0f, 4.25f, 1e-3f};
  fs::path p = dir.path / "t.stgt";
  write_tensor(p, t);
  Tensor back = read_tensor(p);
  CHECK(back.shape == t.shape);
  CHECK(back.role == t.role);
  CHECK(back.attrs.at("variant") == "norms");
  CHECK(back.data == t.data);

  // Load -> save -> load is byte identical.
  fs::path p2 = dir.path / "t2.stgt";
  write_tensor(p2, back);
  CHECK(slurp(p) == slurp(p2));

  SUBCASE("corrupted magic is rejected") {
    std::ofstream out(dir.path / "bad.stgt", std::ios::binary);
    out << "NOPE1234";
    out.close();
    CHECK_THROWS_AS(read_tensor(dir.path / "bad.stgt"), ValidationError);
  }
  SUBCASE("shape-payload mismatch is rejected on write") {
    Tensor bad = t;
    bad.shape = {5, 5};
    CHECK_THROWS_AS(write_tensor(dir.path / "x.stgt", bad), DimensionError);
  }
  SUBCASE("truncated payload is rejected") {
    std::string bytes = slurp(p);
    std::ofstream out(dir.path / "short.stgt", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 5));
    out.close();
    CHECK_THROWS_AS(read_tensor(dir.path / "short.stgt"), ValidationError);
  }
}

TEST_CASE("annotations round trip") {
  TempDir dir;
  GroundingInstance inst;
  inst.video_id = "vid";
  inst.instance_id = 3;
  inst.verb = "ride";
  inst.human.video_id = "vid";
  inst.human.instance_id = 3;
  inst.human.verb = "ride";
  inst.human.frames = {{0, Box{0, 0, 10, 10}, 0.0},
                       {1, Box{1, 1, 11, 11}, 0.0}};
  Tracklet obj = inst.human;
  obj.frames = {{0, Box{4, 4, 8, 8}, 0.0}, {1, Box{5, 5, 9, 9}, 0.0}};
  inst.objects.push_back(obj);

  fs::path p = dir.path / "ann.jsonl";
  save_annotations(p, {inst});
  auto back = load_annotations(p);
  REQUIRE(back.size() == 1);
  CHECK(back[0].video_id == "vid");
  CHECK(back[0].verb == "ride");
  CHECK(back[0].human.frames.size() == 2);
  CHECK(back[0].objects.size() == 1);
  CHECK(back[0].objects[0].frames[1].box == Box{5, 5, 9, 9});

  fs::path p2 = dir.path / "ann2.jsonl";
  save_annotations(p2, back);
  CHECK(slurp(p) == slurp(p2));

  SUBCASE("unknown verbs are rejected with the line number") {
    std::ofstream out(dir.path / "bad.jsonl");
    out << R"({"video_id":"v","instance_id":0,"verb":"fly",)"
        << R"("human":{"frames":[{"ts":0,"box":[0,0,1,1]}]},"objects":[]})"
        << "\n";
    out.close();
    try {
      load_annotations(dir.path / "bad.jsonl");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
  }
  SUBCASE("non-increasing timestamps are rejected with the line number") {
    std::ofstream out(dir.path / "bad2.jsonl");
    out << R"({"video_id":"v","instance_id":0,"verb":"sit","human":{"frames":)"
        << R"([{"ts":1,"box":[0,0,1,1]},{"ts":1,"box":[0,0,1,1]}]},"objects":[]})"
        << "\n";
    out.close();
    try {
      load_annotations(dir.path / "bad2.jsonl");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("bad2.jsonl:1:") != std::string::npos);
    }
  }
  SUBCASE("empty file loads an empty dataset") {
    std::ofstream(dir.path / "empty.jsonl").close();
    CHECK(load_annotations(dir.path / "empty.jsonl").empty());
  }
}

TEST_CASE("predictions round trip") {
  TempDir dir;
  Tracklet t;
  t.video_id = "v";
  t.instance_id = 1;
  t.verb = "sit";
  t.frames = {{0, Box{0, 0, 4, 4}, 0.75}, {1, Box{1, 0, 5, 4}, 0.5}};
  fs::path p = dir.path / "pred.jsonl";
  save_predictions(p, {t});
  auto back = load_predictions(p);
  REQUIRE(back.size() == 1);
  CHECK(back[0].frames[0].score == doctest::Approx(0.75));
  fs::path p2 = dir.path / "pred2.jsonl";
  save_predictions(p2, back);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("candidate files") {
  TempDir dir;
  CandidateSet set;
  set.video_id = "v";
  set.ts = 2;
  set.width = 32;
  set.height = 32;
  set.masks.push_back(Mask::from_rect(32, 32, 0, 0, 8, 8, 1.5f));
  set.masks.push_back(Mask::from_rect(32, 32, 10, 10, 20, 20));
  set.accurate[0].push_back(Mask::from_rect(32, 32, 0, 0, 8, 8));

  fs::path p = dir.path / "cand.json";
  save_candidates(p, set);
  auto back = load_candidates(p, 255);
  CHECK(back.ts == 2);
  REQUIRE(back.masks.size() == 2);
  CHECK(back.masks[0].has_depth());
  CHECK_FALSE(back.masks[1].has_depth());
  CHECK(back.masks[0] == set.masks[0]);
  CHECK(back.accurate.at(0).size() == 1);

  fs::path p2 = dir.path / "cand2.json";
  save_candidates(p2, back);
  CHECK(slurp(p) == slurp(p2));

  SUBCASE("runs that do not cover the grid are a validation error") {
    std::ofstream out(dir.path / "badmask.json");
    out << R"({"video_id":"v","ts":0,"width":4,"height":4,)"
        << R"("masks":[{"counts":[3,2]}]})";
    out.close();
    CHECK_THROWS_AS(load_candidates(dir.path / "badmask.json", 255),
                    ValidationError);
  }
  SUBCASE("mask cap keeps the largest masks") {
    CandidateSet many;
    many.video_id = "v";
    many.ts = 0;
    many.width = 64;
    many.height = 64;
    for (int i = 0; i < 10; ++i) {
      many.masks.push_back(Mask::from_rect(64, 64, 0, 0, i + 1, i + 1));
    }
    fs::path mp = dir.path / "many.json";
    save_candidates(mp, many);
    std::vector<std::string> warnings;
    auto capped = load_candidates(mp, 4, &warnings);
    CHECK(capped.masks.size() == 4);
    CHECK(warnings.size() == 1);
    // The four largest survive, in original order.
    CHECK(capped.masks[0].area() == 7 * 7);
    CHECK(capped.masks[3].area() == 10 * 10);
  }
}

TEST_CASE("cloud records round trip") {
  TempDir dir;
  CloudRecord rec;
  rec.video_id = "v";
  rec.instance_id = 4;
  rec.ts = 1;
  rec.cloud.role = CloudRole::HumanFront;
  rec.cloud.points = {Vec3{0, 0, 0}, Vec3{1, 2, 3}, Vec3{-1, 0.5, 2}};
  rec.pelvis = Vec3{0.5, 1.0, 1.5};
  fs::path p = dir.path / "cloud.stgt";
  save_cloud(p, rec);
  CloudRecord back = load_cloud(p);
  CHECK(back.video_id == "v");
  CHECK(back.instance_id == 4);
  CHECK(back.cloud.role == CloudRole::HumanFront);
  REQUIRE(back.cloud.size() == 3);
  CHECK(back.cloud.points[1].y == doctest::Approx(2.0));
  CHECK(back.pelvis.z == doctest::Approx(1.5));
  SUBCASE("missing sidecar") {
    fs::remove(dir.path / "cloud.stgt.json");
    CHECK_THROWS_AS(load_cloud(p), IoError);
  }
}

TEST_CASE("config round trip and mask cap") {
  TempDir dir;
  RunConfig cfg;
  cfg.fusion.gamma = 0.7;
  cfg.fusion.tau = 0.25;
  cfg.fusion.beta = 0.4;
  cfg.bps.feature_dim = 48;
  cfg.pool_mode = PoolMode::AllCells;
  cfg.aggregation = IouAggregation::MaxOverFrames;
  fs::path p = dir.path / "cfg.json";
  save_config(p, cfg);
  RunConfig back = load_config(p);
  CHECK(back.fusion.gamma == doctest::Approx(0.7));
  CHECK(back.fusion.tau == doctest::Approx(0.25));
  CHECK(back.bps.feature_dim == 48);
  CHECK(back.pool_mode == PoolMode::AllCells);
  CHECK(back.aggregation == IouAggregation::MaxOverFrames);

  SUBCASE("the 256 default clips to 255 with a warning") {
    std::vector<std::string> warnings;
    RunConfig d;
    CHECK(d.max_masks == 256);
    CHECK(d.effective_mask_cap(&warnings) == 255);
    CHECK(warnings.size() == 1);
  }
  SUBCASE("bad values are rejected") {
    RunConfig bad;
    bad.fusion.gamma = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigurationError);
    std::ofstream out(dir.path / "bad.json");
    out << R"({"fusion":{"gamma":2.0}})";
    out.close();
    CHECK_THROWS_AS(load_config(dir.path / "bad.json"), ConfigurationError);
  }
}

TEST_CASE("split problem and solution files") {
  TempDir dir;
  SplitProblem p;
  p.interactions = {{3, 0}, {1, 2}, {0, 4}};
  p.objects = {{1, 1}, {2, 0}, {0, 2}};
  p.heatmaps = {{2, 1}, {1, 1}, {0, 3}};
  p.target_size = 2;
  p.class_floors = {1, 0};
  p.heatmap_floor = 1.0;
  fs::path pp = dir.path / "problem.json";
  save_split_problem(pp, p);
  SplitProblem back = load_split_problem(pp);
  CHECK(back.video_count() == 3);
  CHECK(back.target_size == 2);
  CHECK(back.class_floors == std::vector<double>{1, 0});

  auto sol = solve_exact(back);
  fs::path sp = dir.path / "solution.json";
  save_split_solution(sp, back, sol);
  std::string text = slurp(sp);
  CHECK(text.find("\"selected\"") != std::string::npos);
  CHECK(text.find("\"slack\"") != std::string::npos);
}

TEST_CASE("taxonomy files") {
  TempDir dir;
  {
    std::ofstream out(dir.path / "graph.tsv");
    out << "# comment line\n";
    out << "dog\tanimal\n";
    out << "cat\tanimal\n";
  }
  TaxonomyGraph g = load_taxonomy_graph(dir.path / "graph.tsv");
  CHECK(g.node_count() == 3);
  CHECK(g.depth("dog") == 1);

  {
    std::ofstream out(dir.path / "words.txt");
    out << "dog\ncat\n";
  }
  auto words = load_word_list(dir.path / "words.txt");
  CHECK(words == std::vector<std::string>{"dog", "cat"});

  {
    std::ofstream out(dir.path / "overrides.json");
    out << R"({"puppy":"dog"})";
  }
  auto overrides = load_overrides(dir.path / "overrides.json");
  CHECK(overrides.at("puppy") == "dog");

  auto clusters = cluster_classes(words, g);
  save_clusters(dir.path / "clusters.json", clusters);
  CHECK(slurp(dir.path / "clusters.json").find("dog") != std::string::npos);

  ClassTree tree = construct_tree(clusters[0], g);
  save_tree(dir.path / "tree.json", tree);
  std::string outline = tree_outline(tree);
  CHECK(outline == "dog\n  cat\n");

  SUBCASE("malformed tsv") {
    std::ofstream out(dir.path / "bad.tsv");
    out << "no-tab-here\n";
    out.close();
    CHECK_THROWS_AS(load_taxonomy_graph(dir.path / "bad.tsv"), ValidationError);
  }
}

TEST_CASE("report files") {
  TempDir dir;
  EvalReport r;
  r.map[0.5] = 0.75;
  r.map[0.9] = 0.25;
  r.miou_w = 0.6;
  r.total_instances = 4;
  r.mode = "with-depth";
  r.size_bins["small"] = {2, 0.5, 0.4};
  save_report(dir.path / "report.json", r, "test-run");
  std::string text = slurp(dir.path / "report.json");
  CHECK(text.find("\"label\": \"test-run\"") != std::string::npos);
  CHECK(text.find("\"0.5\": 0.75") != std::string::npos);

  save_report_csv(dir.path / "report.csv", r, "test-run");
  std::string csv = slurp(dir.path / "report.csv");
  CHECK(csv.find("method,mAP@0.5,mAP@0.9,mIoU_w") == 0);
  CHECK(csv.find("test-run,0.7500,0.2500,0.6000") != std::string::npos);
}

TEST_SUITE_END();
