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

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stgt/geometry.hpp"

namespace stgt {

/// Dense context feature grid, row-major (y, x, channel).
struct FeatureMap {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<double> data;

  double at(int y, int x, int d) const {
    return data[(static_cast<std::size_t>(y) * width + x) * dim + d];
  }
  double& at(int y, int x, int d) {
    return data[(static_cast<std::size_t>(y) * width + x) * dim + d];
  }
  void validate() const;
};

enum class FeatureKind {
  Object,
  VerbLanguage,
  HumanQuery,
  DecoderOutput,
};

struct FeatureVec {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::Object;

  int dim() const { return static_cast<int>(values.size()); }
  double norm() const;
};

double cosine_similarity(const FeatureVec& a, const FeatureVec& b);

struct FusionConfig {
  double gamma = 0.5;  // weight of the cosine score in the fusion
  double tau = 0.5;    // selection threshold on the fused score
  double beta = 0.5;   // depth-mode difference bound for mask clustering

  void validate() const;
};

struct ScoredMask {
  std::size_t index = 0;
  double s_m = 0.0;  // cosine score against the query
  double s_d = 0.0;  // GIoU proximity to the human box
  double s_f = 0.0;  // gamma * s_m + (1 - gamma) * s_d
  double depth_mode = std::numeric_limits<double>::quiet_NaN();
};

enum class PoolMode {
  ForegroundMean,  // masked average: sum over foreground cells / count
  AllCells,        // literal average pool: sum over foreground cells / (H*W)
};

/// Mask-pooled object feature. The mask is nearest-neighbor resized to the
/// map resolution first; an empty resized mask is an error.
FeatureVec pool_object_feature(const FeatureMap& fc, const Mask& m,
                               PoolMode mode = PoolMode::ForegroundMean);

/// Nearest-neighbor resize of a mask to new dimensions, sampling at cell
/// centers. Exposed because pooling and fixture construction must agree on
/// the convention.
Mask resize_mask_nearest(const Mask& m, int new_width, int new_height);

/// Human query vector: temporal mean of the slices, ROI-aligned over hbox on
/// a 7x7 bilinear grid (4 samples per cell), then spatially averaged.
/// hbox is given in feature-map coordinates.
FeatureVec pool_human_query(const std::vector<FeatureMap>& fc_slices,
                            const Box& hbox);

/// Indices of proposals whose intersection with the accurate mask exceeds
/// 0.9 of their own area (strict). Zero-area proposals are skipped with a
/// warning and never matched.
std::vector<std::size_t> match_gt_masks(const std::vector<Mask>& proposals,
                                        const Mask& accurate,
                                        std::vector<std::string>* warnings = nullptr);

std::vector<ScoredMask> score_masks(const FeatureVec& fq,
                                    const std::vector<FeatureVec>& mask_feats,
                                    const std::vector<Box>& mask_boxes,
                                    const Box& hbox, const FusionConfig& cfg);

/// All indices with fused score strictly above tau; when none qualify, the
/// single argmax index (ties to the lowest index).
std::vector<std::size_t> select_masks(const std::vector<ScoredMask>& scored,
                                      const FusionConfig& cfg);

/// Most frequent depth after quantization into fixed-width bins; ties go to
/// the smaller depth. The returned value is the smallest observed depth in
/// the winning bin.
double depth_mode(const Mask& m, double bin_width = 0.05);

struct BoxPrediction {
  Box box;
  double score = 0.0;
};

/// Builds the output boxes for one keyframe from the selected candidate
/// masks. Box A is the union bounding box of all selected masks. With depth,
/// box B is the union over the depth cluster of the highest-scoring mask
/// (depth-mode difference < beta) and is emitted first; box A follows with
/// its score scaled by 0.99 to keep a strict ranking.
std::vector<BoxPrediction> generate_boxes(const std::vector<Mask>& masks,
                                          const std::vector<ScoredMask>& scored,
                                          const std::vector<std::size_t>& selected,
                                          const FusionConfig& cfg,
                                          bool use_depth);

/// Mean binary cross entropy with the positive term weighted by pos_weight.
/// Predictions are clamped to [1e-7, 1 - 1e-7].
double weighted_bce(const std::vector<double>& predictions,
                    const std::vector<int>& labels, double pos_weight = 10.0);

struct GridSpec {
  std::vector<double> gammas;
  std::vector<double> taus;
  std::vector<double> betas;

  static GridSpec defaults();
};

struct GridSearchResult {
  FusionConfig best;
  double metric = 0.0;
};

/// Exhaustive search over the grid maximizing eval_fn; ties resolve to the
/// lexicographically smallest (gamma, tau, beta). Cells may be evaluated in
/// parallel; the reduction order is fixed, so results are reproducible for
/// any thread count.
GridSearchResult grid_search(
    const std::function<double(const FusionConfig&)>& eval_fn,
    const GridSpec& grid, int threads = 1);

}  // namespace stgt
