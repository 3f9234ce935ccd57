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

#include "stgt/fixture.hpp"
#include "stgt/pipeline.hpp"
#include "stgt/tensor.hpp"

using namespace stgt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("stgt_pipeline_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("oracle fixture grounds perfectly") {
  TempDir dir("oracle");
  FixtureSpec spec;
  spec.seed = 7;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);

  Dataset ds = load_dataset(dir.path, cfg);
  CHECK(ds.annotations.size() == 4);
  CHECK(ds.has_depth);
  CHECK(ds.has_features);

  PipelineResult result = run_pipeline(ds, cfg, 1);
  CHECK(result.failed_instances == 0);
  CHECK(result.mode == "with-depth");
  for (const auto& [t, v] : result.report.map) {
    CHECK(v == doctest::Approx(1.0));
  }
  CHECK(result.report.miou_w >= 0.99);
  // Two predictions per instance: the depth-cluster box and the union box.
  CHECK(result.predictions.size() == 2 * ds.annotations.size());
}

TEST_CASE("pipeline determinism across worker counts") {
  TempDir dir("threads");
  FixtureSpec spec;
  spec.seed = 11;
  spec.instances = 6;
  spec.videos = 3;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);
  Dataset ds = load_dataset(dir.path, cfg);

  PipelineResult serial = run_pipeline(ds, cfg, 1);
  PipelineResult parallel = run_pipeline(ds, cfg, 4);
  REQUIRE(serial.predictions.size() == parallel.predictions.size());
  for (std::size_t i = 0; i < serial.predictions.size(); ++i) {
    const Tracklet& a = serial.predictions[i];
    const Tracklet& b = parallel.predictions[i];
    CHECK(a.video_id == b.video_id);
    CHECK(a.instance_id == b.instance_id);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
      CHECK(a.frames[f].box == b.frames[f].box);
      CHECK(a.frames[f].score == b.frames[f].score);
    }
  }
  CHECK(serial.report.miou_w == parallel.report.miou_w);
}

TEST_CASE("2d-only mode without depth") {
  TempDir dir("nodepth");
  FixtureSpec spec;
  spec.seed = 3;
  spec.with_depth = false;
  spec.with_clouds = false;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);
  Dataset ds = load_dataset(dir.path, cfg);
  CHECK_FALSE(ds.has_depth);

  PipelineResult result = run_pipeline(ds, cfg, 1);
  CHECK(result.mode == "2d-only");
  // One union-box prediction per instance.
  CHECK(result.predictions.size() == ds.annotations.size());
  CHECK(result.report.map.at(0.5) == doctest::Approx(1.0));
}

TEST_CASE("adversarial queries degrade cosine-only grounding") {
  TempDir oracle_dir("adv_base"), adv_dir("adv");
  FixtureSpec spec;
  spec.seed = 7;
  RunConfig cfg;
  generate_fixture(oracle_dir.path, spec, cfg);
  spec.adversarial = true;
  generate_fixture(adv_dir.path, spec, cfg);

  RunConfig cosine_only = cfg;
  cosine_only.fusion.gamma = 1.0;
  RunConfig proximity_only = cfg;
  proximity_only.fusion.gamma = 0.0;

  Dataset oracle_ds = load_dataset(oracle_dir.path, cfg);
  Dataset adv_ds = load_dataset(adv_dir.path, cfg);

  double oracle_map = run_pipeline(oracle_ds, cosine_only, 1).report.map.at(0.5);
  PipelineResult adv_cosine = run_pipeline(adv_ds, cosine_only, 1);
  PipelineResult adv_proximity = run_pipeline(adv_ds, proximity_only, 1);

  CHECK(adv_cosine.report.map.at(0.5) < oracle_map);
  // The two weightings must produce measurably different rankings.
  bool differs = adv_cosine.predictions.size() != adv_proximity.predictions.size();
  for (std::size_t i = 0;
       !differs && i < adv_cosine.predictions.size(); ++i) {
    const auto& a = adv_cosine.predictions[i];
    const auto& b = adv_proximity.predictions[i];
    if (a.frames.size() != b.frames.size()) {
      differs = true;
      break;
    }
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
      if (!(a.frames[f].box == b.frames[f].box) ||
          a.frames[f].score != b.frames[f].score) {
        differs = true;
        break;
      }
    }
  }
  CHECK(differs);
}

TEST_CASE("dataset loading errors") {
  TempDir dir("errors");
  FixtureSpec spec;
  spec.seed = 5;
  spec.videos = 1;
  spec.instances = 1;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);

  SUBCASE("missing candidate file is named in the error") {
    fs::path victim = dir.path / "candidates" / "video_0" / "1.json";
    fs::remove(victim);
    try {
      load_dataset(dir.path, cfg);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("1.json") != std::string::npos);
    }
  }
  SUBCASE("missing feature file is named in the error") {
    fs::remove(dir.path / "features" / "video_0" / "0.stgt");
    CHECK_THROWS_AS(load_dataset(dir.path, cfg), ValidationError);
  }
  SUBCASE("empty annotation file loads an empty dataset") {
    std::ofstream(dir.path / "annotations.jsonl", std::ios::trunc).close();
    Dataset ds = load_dataset(dir.path, cfg);
    CHECK(ds.annotations.empty());
    PipelineResult result = run_pipeline(ds, cfg, 1);
    CHECK(result.predictions.empty());
    CHECK(result.report.total_instances == 0);
  }
}

TEST_CASE("per-instance failures never abort the batch") {
  TempDir dir("partial");
  FixtureSpec spec;
  spec.seed = 17;
  spec.videos = 2;
  spec.instances = 2;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);

  // Zero out one instance's query tensor: cosine scoring against a zero
  // vector fails that instance, the other must still ground.
  fs::path qpath = dir.path / "queries" / "video_0" / "0" / "0.stgt";
  Tensor t = read_tensor(qpath);
  std::fill(t.data.begin(), t.data.end(), 0.0f);
  write_tensor(qpath, t);

  Dataset ds = load_dataset(dir.path, cfg);
  PipelineResult result = run_pipeline(ds, cfg, 1);
  CHECK(result.failed_instances == 1);
  CHECK(result.predictions.size() == 2);  // the healthy instance's two boxes
  CHECK_FALSE(result.diagnostics.empty());
}

TEST_CASE("fixture generation is deterministic") {
  TempDir a("det_a"), b("det_b");
  FixtureSpec spec;
  spec.seed = 21;
  RunConfig cfg;
  generate_fixture(a.path, spec, cfg);
  generate_fixture(b.path, spec, cfg);

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.path)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), a.path);
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(b.path / rel, std::ios::binary);
    REQUIRE(fb.good());
    std::string ca((std::istreambuf_iterator<char>(fa)),
                   std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(fb)),
                   std::istreambuf_iterator<char>());
    CHECK(ca == cb);
    ++compared;
  }
  CHECK(compared > 10);

  SUBCASE("different seeds differ somewhere") {
    TempDir c("det_c");
    FixtureSpec other = spec;
    other.seed = 22;
    generate_fixture(c.path, other, cfg);
    bool any_diff = false;
    for (const auto& entry : fs::recursive_directory_iterator(a.path)) {
      if (!entry.is_regular_file()) continue;
      fs::path rel = fs::relative(entry.path(), a.path);
      std::ifstream fa(entry.path(), std::ios::binary);
      std::ifstream fc(c.path / rel, std::ios::binary);
      if (!fc.good()) {
        any_diff = true;
        break;
      }
      std::string ca((std::istreambuf_iterator<char>(fa)),
                     std::istreambuf_iterator<char>());
      std::string cc((std::istreambuf_iterator<char>(fc)),
                     std::istreambuf_iterator<char>());
      if (ca != cc) {
        any_diff = true;
        break;
      }
    }
    CHECK(any_diff);
  }
}

TEST_CASE("tune finds a config that grounds the oracle fixture") {
  TempDir dir("tune");
  FixtureSpec spec;
  spec.seed = 13;
  spec.instances = 2;
  spec.videos = 1;
  spec.frames = 2;
  RunConfig cfg;
  generate_fixture(dir.path, spec, cfg);
  Dataset ds = load_dataset(dir.path, cfg);

  GridSpec grid{{0.0, 0.5, 1.0}, {0.3, 0.6}, {0.5}};
  GridSearchResult r1 = tune(ds, cfg, grid, 1);
  GridSearchResult r2 = tune(ds, cfg, grid, 4);
  CHECK(r1.metric == doctest::Approx(1.0));
  CHECK(r1.best.gamma == r2.best.gamma);
  CHECK(r1.best.tau == r2.best.tau);
  CHECK(r1.best.beta == r2.best.beta);
  // Ties across perfect cells resolve to the lexicographically smallest.
  CHECK(r1.best.gamma == doctest::Approx(0.0));
}

TEST_SUITE_END();
