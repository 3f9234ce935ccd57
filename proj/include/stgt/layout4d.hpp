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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "stgt/error.hpp"

namespace stgt {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double squared_norm() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }
  bool operator==(const Vec3& o) const = default;
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

enum class CloudRole {
  HumanMesh,
  Scene,
  HumanFront,
  SceneCorrespondence,
  BasePoints,
};

std::string cloud_role_name(CloudRole role);
CloudRole cloud_role_from_name(const std::string& name);

struct PointCloud {
  std::vector<Vec3> points;
  CloudRole role = CloudRole::Scene;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

Vec3 centroid(const PointCloud& cloud);

/// Mean Euclidean distance over all ordered point pairs, self-pairs included
/// (they contribute zero and divide out in the scale ratio).
double mean_pairwise_distance(const PointCloud& cloud);

/// Similarity transform p -> p * scale + displacement.
struct AlignmentTransform {
  double scale = 1.0;
  Vec3 displacement{};
};

/// Recovers scale and displacement that carry the scene correspondence cloud
/// onto the human front-surface cloud: scale is the ratio of mean pairwise
/// distances, displacement is taken against the already-scaled scene points.
/// Requires index-corresponding clouds of equal size >= 2.
AlignmentTransform align_scene_to_human(const PointCloud& human_front,
                                        const PointCloud& scene_corresp);

PointCloud apply_alignment(const PointCloud& cloud,
                           const AlignmentTransform& t);

struct BpsConfig {
  int feature_dim = 64;        // D; D/2 base points
  double radius_factor = 1.5;  // sphere radius = radius_factor * body height
  std::uint64_t seed = 0;

  void validate() const;
};

struct BpsFeature {
  /// Length D: first D/2 entries are nearest-human distances, second D/2
  /// nearest-scene distances, one pair per base point.
  std::vector<double> values;
  Vec3 anchor{};  // pelvis position the base sphere was centered on
};

/// D/2 points sampled uniformly inside the sphere of radius
/// radius_factor * body_height around the pelvis. Seeded rejection sampling;
/// identical output for identical seeds.
PointCloud generate_base_points(const BpsConfig& cfg, const Vec3& pelvis,
                                double body_height);

enum class NnMode {
  Auto,    // linear scan below 10k points, grid index above
  Linear,
  Grid,
};

/// Basis-point-set encoding: per base point, the distance to the nearest
/// human point and the nearest scene point. Exact for every NnMode.
BpsFeature bps_encode(const PointCloud& base, const PointCloud& human,
                      const PointCloud& scene, NnMode mode = NnMode::Auto);

/// Vertical extent (max - min along the y axis) of a mesh cloud; the
/// operational body height used to size the base-point sphere.
double body_height(const PointCloud& human_mesh);

}  // namespace stgt
