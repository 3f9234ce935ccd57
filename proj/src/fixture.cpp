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

#include "stgt/fixture.hpp"

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "stgt/dataset.hpp"
#include "stgt/rng.hpp"
#include "stgt/tensor.hpp"

namespace stgt {

namespace {

constexpr int kImage = 128;    // square frames
constexpr int kMap = 16;       // context feature map resolution
constexpr double kBias = 0.05; // background channel weight

struct SceneInstance {
  std::string video_id;
  std::int64_t instance_id;
  std::string verb;
  int channel;      // feature channel carrying this instance's GT signal
  int qx, qy;       // quadrant origin
  double gt_depth;
  std::vector<Box> human_boxes;  // per frame
  std::vector<Box> object_boxes; // per frame, integer coordinates
};

Box jittered(int x1, int y1, int w, int h, int qx, int qy, Rng& rng) {
  int dx = static_cast<int>(rng.uniform_int(-2, 2));
  int dy = static_cast<int>(rng.uniform_int(-2, 2));
  double bx1 = qx + x1 + dx;
  double by1 = qy + y1 + dy;
  return Box{bx1, by1, bx1 + w, by1 + h};
}

Mask rect_mask(const Box& b, double depth, bool with_depth) {
  int x1 = static_cast<int>(b.x1), y1 = static_cast<int>(b.y1);
  int x2 = static_cast<int>(b.x2), y2 = static_cast<int>(b.y2);
  if (with_depth) {
    return Mask::from_rect(kImage, kImage, x1, y1, x2, y2,
                           static_cast<float>(depth));
  }
  return Mask::from_rect(kImage, kImage, x1, y1, x2, y2);
}

}  // namespace

void generate_fixture(const std::filesystem::path& root,
                      const FixtureSpec& spec, const RunConfig& cfg) {
  if (spec.videos < 1 || spec.instances < 1 || spec.frames < 1) {
    throw ConfigurationError("fixture sizes must be at least 1");
  }
  if (cfg.feature_dim < 2) {
    throw ConfigurationError("fixture needs feature_dim >= 2");
  }
  std::filesystem::create_directories(root);
  Rng rng(spec.seed);

  const auto& verbs = interaction_classes();

  // Lay out instances: round-robin over videos, one quadrant per instance
  // within its video (wrapping after four).
  std::vector<SceneInstance> instances;
  std::vector<std::string> video_ids;
  for (int v = 0; v < spec.videos; ++v) {
    video_ids.push_back("video_" + std::to_string(v));
  }
  std::map<std::string, int> per_video;
  for (int i = 0; i < spec.instances; ++i) {
    SceneInstance inst;
    inst.video_id = video_ids[static_cast<std::size_t>(i % spec.videos)];
    int slot = per_video[inst.video_id]++;
    inst.instance_id = slot;
    inst.verb = verbs[static_cast<std::size_t>(
        rng.next_below(verbs.size()))];
    inst.channel = 1 + i % (cfg.feature_dim - 1);
    inst.qx = (slot % 2) * 64;
    inst.qy = ((slot / 2) % 2) * 64;
    inst.gt_depth = 1.0 + 0.1 * static_cast<double>(i);
    for (int f = 0; f < spec.frames; ++f) {
      inst.human_boxes.push_back(jittered(8, 28, 24, 32, inst.qx, inst.qy, rng));
      inst.object_boxes.push_back(jittered(28, 36, 16, 16, inst.qx, inst.qy, rng));
    }
    instances.push_back(std::move(inst));
  }

  // Annotations.
  std::vector<GroundingInstance> annotations;
  for (const SceneInstance& si : instances) {
    GroundingInstance g;
    g.video_id = si.video_id;
    g.instance_id = si.instance_id;
    g.verb = si.verb;
    g.human.video_id = si.video_id;
    g.human.instance_id = si.instance_id;
    g.human.verb = si.verb;
    Tracklet obj = g.human;
    for (int f = 0; f < spec.frames; ++f) {
      g.human.frames.push_back({f, si.human_boxes[f], 0.0});
      obj.frames.push_back({f, si.object_boxes[f], 0.0});
    }
    g.objects.push_back(std::move(obj));
    annotations.push_back(std::move(g));
  }
  save_annotations(root / "annotations.jsonl", annotations);

  // Candidates, context maps and queries, one file set per (video, frame).
  std::filesystem::create_directories(root / "candidates");
  std::filesystem::create_directories(root / "features");
  std::filesystem::create_directories(root / "queries");
  if (spec.with_clouds) std::filesystem::create_directories(root / "clouds");

  for (const std::string& vid : video_ids) {
    std::filesystem::create_directories(root / "candidates" / vid);
    std::filesystem::create_directories(root / "features" / vid);
    for (int f = 0; f < spec.frames; ++f) {
      CandidateSet set;
      set.video_id = vid;
      set.ts = f;
      set.width = kImage;
      set.height = kImage;

      FeatureMap fc;
      fc.height = kMap;
      fc.width = kMap;
      fc.dim = cfg.feature_dim;
      fc.data.assign(static_cast<std::size_t>(kMap) * kMap * cfg.feature_dim,
                     0.0);
      for (int y = 0; y < kMap; ++y) {
        for (int x = 0; x < kMap; ++x) fc.at(y, x, 0) = kBias;
      }

      for (const SceneInstance& si : instances) {
        if (si.video_id != vid) continue;
        Mask gt = rect_mask(si.object_boxes[f], si.gt_depth, spec.with_depth);
        set.masks.push_back(gt);
        set.accurate[si.instance_id].push_back(
            rect_mask(si.object_boxes[f], si.gt_depth, false));
        // Distractors live in the top strip of the quadrant, depth-separated
        // from the GT object.
        for (int d = 0; d < spec.distractors; ++d) {
          int x1 = si.qx + 8 + (d % 2) * 32;
          int y1 = si.qy + 4;
          Box db{static_cast<double>(x1), static_cast<double>(y1),
                 static_cast<double>(x1 + 16), static_cast<double>(y1 + 16)};
          set.masks.push_back(
              rect_mask(db, si.gt_depth + 2.0 + d, spec.with_depth));
        }
        // Paint the instance channel over the GT region at map resolution,
        // with the same resize the pooling step applies.
        Mask small = resize_mask_nearest(gt, kMap, kMap);
        auto grid = small.to_grid();
        for (int x = 0; x < kMap; ++x) {
          for (int y = 0; y < kMap; ++y) {
            if (grid[static_cast<std::size_t>(x) * kMap + y]) {
              fc.at(y, x, si.channel) += 1.0;
            }
          }
        }
      }
      save_candidates(root / "candidates" / vid / (std::to_string(f) + ".json"),
                      set);

      Tensor ft;
      ft.role = "context";
      ft.shape = {kMap, kMap, cfg.feature_dim};
      ft.data.assign(fc.data.begin(), fc.data.end());
      write_tensor(root / "features" / vid / (std::to_string(f) + ".stgt"), ft);
    }
  }

  // Query tensors: every row is the instance's channel one-hot (oracle) or
  // the bias channel (adversarial; orthogonal to every GT channel).
  for (const SceneInstance& si : instances) {
    std::filesystem::path qdir =
        root / "queries" / si.video_id / std::to_string(si.instance_id);
    std::filesystem::create_directories(qdir);
    for (int f = 0; f < spec.frames; ++f) {
      Tensor qt;
      qt.role = "query";
      qt.shape = {cfg.num_queries, cfg.feature_dim};
      qt.data.assign(
          static_cast<std::size_t>(cfg.num_queries) * cfg.feature_dim, 0.0f);
      int hot = spec.adversarial ? 0 : si.channel;
      for (int q = 0; q < cfg.num_queries; ++q) {
        qt.data[static_cast<std::size_t>(q) * cfg.feature_dim + hot] = 1.0f;
      }
      write_tensor(qdir / (std::to_string(f) + ".stgt"), qt);
    }
  }

  // Point clouds: a human mesh block, its front surface, the corresponding
  // scene points under a random scale/shift (so alignment has something to
  // recover), and a loose scene cloud.
  if (spec.with_clouds) {
    for (const SceneInstance& si : instances) {
      std::filesystem::path cdir =
          root / "clouds" / si.video_id / std::to_string(si.instance_id);
      std::filesystem::create_directories(cdir);
      for (int f = 0; f < spec.frames; ++f) {
        double ox = si.qx / 64.0, oy = si.qy / 64.0;

        CloudRecord mesh;
        mesh.video_id = si.video_id;
        mesh.instance_id = si.instance_id;
        mesh.ts = f;
        mesh.cloud.role = CloudRole::HumanMesh;
        for (int ix = 0; ix < 3; ++ix) {
          for (int iy = 0; iy < 6; ++iy) {
            for (int iz = 0; iz < 2; ++iz) {
              mesh.cloud.points.push_back(Vec3{ox + 0.2 * ix, oy + 0.34 * iy,
                                               2.0 + 0.2 * iz});
            }
          }
        }
        mesh.pelvis = centroid(mesh.cloud);

        CloudRecord front = mesh;
        front.cloud = PointCloud{{}, CloudRole::HumanFront};
        for (int ix = 0; ix < 4; ++ix) {
          for (int iy = 0; iy < 4; ++iy) {
            front.cloud.points.push_back(
                Vec3{ox + 0.15 * ix, oy + 0.45 * iy, 2.0});
          }
        }

        double s0 = rng.uniform(0.5, 2.0);
        Vec3 b0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0)};
        CloudRecord corresp = front;
        corresp.cloud = PointCloud{{}, CloudRole::SceneCorrespondence};
        for (const Vec3& p : front.cloud.points) {
          corresp.cloud.points.push_back((p - b0) * (1.0 / s0));
        }

        CloudRecord scene = mesh;
        scene.cloud = PointCloud{{}, CloudRole::Scene};
        for (int i = 0; i < 64; ++i) {
          scene.cloud.points.push_back(Vec3{rng.uniform(-3.0, 3.0),
                                            rng.uniform(-3.0, 3.0),
                                            rng.uniform(1.0, 5.0)});
        }

        save_cloud(cdir / (std::to_string(f) + ".human-mesh.stgt"), mesh);
        save_cloud(cdir / (std::to_string(f) + ".human-front.stgt"), front);
        save_cloud(cdir / (std::to_string(f) + ".scene-corresp.stgt"), corresp);
        save_cloud(cdir / (std::to_string(f) + ".scene.stgt"), scene);
      }
    }
  }

  nlohmann::json manifest;
  manifest["format"] = "stgt-dataset";
  manifest["version"] = 1;
  manifest["image_width"] = kImage;
  manifest["image_height"] = kImage;
  manifest["videos"] = video_ids;
  manifest["instances"] = spec.instances;
  manifest["has_features"] = true;
  manifest["has_depth"] = spec.with_depth;
  manifest["has_clouds"] = spec.with_clouds;
  manifest["feature_dim"] = cfg.feature_dim;
  manifest["num_queries"] = cfg.num_queries;
  manifest["adversarial"] = spec.adversarial;
  std::ofstream out(root / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest in " + root.string());
  out << manifest.dump(2) << "\n";
}

}  // namespace stgt
