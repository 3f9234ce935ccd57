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

#include "stgt/layout4d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "stgt/rng.hpp"

namespace stgt {

std::string cloud_role_name(CloudRole role) {
  switch (role) {
    case CloudRole::HumanMesh: return "human-mesh";
    case CloudRole::Scene: return "scene";
    case CloudRole::HumanFront: return "human-front-surface";
    case CloudRole::SceneCorrespondence: return "scene-correspondence";
    case CloudRole::BasePoints: return "base-points";
  }
  throw ConfigurationError("unknown cloud role");
}

CloudRole cloud_role_from_name(const std::string& name) {
  if (name == "human-mesh") return CloudRole::HumanMesh;
  if (name == "scene") return CloudRole::Scene;
  if (name == "human-front-surface") return CloudRole::HumanFront;
  if (name == "scene-correspondence") return CloudRole::SceneCorrespondence;
  if (name == "base-points") return CloudRole::BasePoints;
  throw ConfigurationError("unknown cloud role: " + name);
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyCloudError("centroid of an empty cloud");
  Vec3 sum{};
  for (const Vec3& p : cloud.points) sum = sum + p;
  return sum * (1.0 / static_cast<double>(cloud.size()));
}

double mean_pairwise_distance(const PointCloud& cloud) {
  std::size_t n = cloud.size();
  if (n == 0) throw EmptyCloudError("mean pairwise distance of empty cloud");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += distance(cloud.points[i], cloud.points[j]);
    }
  }
  // Ordered pairs: (i,j) and (j,i) both count, self-pairs contribute zero.
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n));
}

AlignmentTransform align_scene_to_human(const PointCloud& human_front,
                                        const PointCloud& scene_corresp) {
  if (human_front.size() != scene_corresp.size()) {
    throw DimensionError("alignment clouds must be index-corresponding");
  }
  if (human_front.size() < 2) {
    throw InsufficientPointsError(
        "alignment requires at least 2 corresponding points");
  }
  double d_h = mean_pairwise_distance(human_front);
  double d_s = mean_pairwise_distance(scene_corresp);
  if (d_s == 0.0) {
    throw DegenerateCloudError("scene correspondence points are coincident");
  }
  if (d_h == 0.0) {
    throw DegenerateCloudError("human front-surface points are coincident");
  }
  double s = d_h / d_s;
  // Displacement is measured after scaling the scene points.
  Vec3 b = centroid(human_front) - centroid(scene_corresp) * s;
  return AlignmentTransform{s, b};
}

PointCloud apply_alignment(const PointCloud& cloud,
                           const AlignmentTransform& t) {
  PointCloud out;
  out.role = cloud.role;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    out.points.push_back(p * t.scale + t.displacement);
  }
  return out;
}

void BpsConfig::validate() const {
  if (feature_dim <= 0 || feature_dim % 2 != 0) {
    throw ConfigurationError("bps feature_dim must be a positive even number");
  }
  if (radius_factor <= 0.0) {
    throw ConfigurationError("bps radius_factor must be positive");
  }
}

PointCloud generate_base_points(const BpsConfig& cfg, const Vec3& pelvis,
                                double body_height) {
  cfg.validate();
  if (!(body_height > 0.0)) {
    throw InvalidAnthropometryError("body height must be positive");
  }
  double radius = cfg.radius_factor * body_height;
  PointCloud base;
  base.role = CloudRole::BasePoints;
  int count = cfg.feature_dim / 2;
  base.points.reserve(count);
  Rng rng(cfg.seed);
  while (static_cast<int>(base.points.size()) < count) {
    double x = rng.uniform(-1.0, 1.0);
    double y = rng.uniform(-1.0, 1.0);
    double z = rng.uniform(-1.0, 1.0);
    if (x * x + y * y + z * z > 1.0) continue;
    base.points.push_back(pelvis + Vec3{x, y, z} * radius);
  }
  return base;
}

namespace {

constexpr std::size_t kLinearScanLimit = 10000;

double nearest_sq_linear(const Vec3& q, const std::vector<Vec3>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : pts) {
    best = std::min(best, (q - p).squared_norm());
  }
  return best;
}

// Uniform voxel hash over the cloud; queries expand Chebyshev rings of cells
// until the best squared distance beats the lower bound of the next ring.
// Returns exactly the same minima as the linear scan: distances are computed
// with identical arithmetic and the ring bound is conservative.
class VoxelGrid {
 public:
  explicit VoxelGrid(const std::vector<Vec3>& pts) : pts_(pts) {
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    origin_ = lo;
    double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    double cells_per_axis =
        std::max(1.0, std::cbrt(static_cast<double>(pts.size())));
    cell_ = extent > 0.0 ? extent / cells_per_axis : 1.0;
    for (int axis = 0; axis < 3; ++axis) {
      cell_lo_[axis] = std::numeric_limits<long long>::max();
      cell_hi_[axis] = std::numeric_limits<long long>::min();
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      long long c[3];
      cell_coords(pts[i], c);
      for (int axis = 0; axis < 3; ++axis) {
        cell_lo_[axis] = std::min(cell_lo_[axis], c[axis]);
        cell_hi_[axis] = std::max(cell_hi_[axis], c[axis]);
      }
      cells_[pack(c[0], c[1], c[2])].push_back(i);
    }
  }

  double nearest_sq(const Vec3& q) const {
    long long c[3];
    cell_coords(q, c);
    // Once ring exceeds this, every occupied cell has been visited.
    long long max_ring = 0;
    for (int axis = 0; axis < 3; ++axis) {
      max_ring = std::max(max_ring, std::max(std::llabs(c[axis] - cell_lo_[axis]),
                                             std::llabs(c[axis] - cell_hi_[axis])));
    }
    double best = std::numeric_limits<double>::infinity();
    for (long long ring = 0; ring <= max_ring; ++ring) {
      if (ring > 0) {
        // Any point in a cell at Chebyshev ring k is >= (k-1)*cell_ away.
        double bound = static_cast<double>(ring - 1) * cell_;
        if (best <= bound * bound) break;
      }
      scan_ring(q, c[0], c[1], c[2], ring, best);
    }
    return best;
  }

 private:
  void cell_coords(const Vec3& p, long long out[3]) const {
    out[0] = static_cast<long long>(std::floor((p.x - origin_.x) / cell_));
    out[1] = static_cast<long long>(std::floor((p.y - origin_.y) / cell_));
    out[2] = static_cast<long long>(std::floor((p.z - origin_.z) / cell_));
  }

  static std::int64_t pack(long long x, long long y, long long z) {
    // 21 bits per axis. Key collisions only merge buckets, which adds
    // candidates to a scan but never removes any, so exactness holds.
    constexpr std::int64_t kOffset = 1 << 20;
    return (((x + kOffset) & 0x1FFFFF) << 42) |
           (((y + kOffset) & 0x1FFFFF) << 21) | ((z + kOffset) & 0x1FFFFF);
  }

  void scan_ring(const Vec3& q, long long cx, long long cy, long long cz,
                 long long ring, double& best) const {
    auto visit = [&](long long x, long long y, long long z) {
      auto it = cells_.find(pack(x, y, z));
      if (it == cells_.end()) return;
      for (std::size_t idx : it->second) {
        best = std::min(best, (q - pts_[idx]).squared_norm());
      }
    };
    if (ring == 0) {
      visit(cx, cy, cz);
      return;
    }
    for (long long dx = -ring; dx <= ring; ++dx) {
      for (long long dy = -ring; dy <= ring; ++dy) {
        for (long long dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) !=
              ring) {
            continue;
          }
          visit(cx + dx, cy + dy, cz + dz);
        }
      }
    }
  }

  const std::vector<Vec3>& pts_;
  Vec3 origin_{};
  double cell_ = 1.0;
  long long cell_lo_[3] = {0, 0, 0};
  long long cell_hi_[3] = {0, 0, 0};
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

std::vector<double> nearest_distances(const PointCloud& base,
                                      const std::vector<Vec3>& pts,
                                      NnMode mode) {
  std::vector<double> out;
  out.reserve(base.size());
  bool use_grid = mode == NnMode::Grid ||
                  (mode == NnMode::Auto && pts.size() >= kLinearScanLimit);
  if (use_grid) {
    VoxelGrid grid(pts);
    for (const Vec3& q : base.points) {
      out.push_back(std::sqrt(grid.nearest_sq(q)));
    }
  } else {
    for (const Vec3& q : base.points) {
      out.push_back(std::sqrt(nearest_sq_linear(q, pts)));
    }
  }
  return out;
}

}  // namespace

BpsFeature bps_encode(const PointCloud& base, const PointCloud& human,
                      const PointCloud& scene, NnMode mode) {
  if (base.empty()) throw EmptyCloudError("bps base point set is empty");
  if (human.empty()) throw EmptyCloudError("bps human cloud is empty");
  if (scene.empty()) throw EmptyCloudError("bps scene cloud is empty");
  BpsFeature feat;
  feat.values = nearest_distances(base, human.points, mode);
  std::vector<double> scene_half = nearest_distances(base, scene.points, mode);
  feat.values.insert(feat.values.end(), scene_half.begin(), scene_half.end());
  return feat;
}

double body_height(const PointCloud& human_mesh) {
  if (human_mesh.empty()) throw EmptyCloudError("body height of empty cloud");
  double lo = human_mesh.points[0].y, hi = human_mesh.points[0].y;
  for (const Vec3& p : human_mesh.points) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  return hi - lo;
}

}  // namespace stgt
