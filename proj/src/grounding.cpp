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

#include "stgt/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stgt/parallel.hpp"

namespace stgt {

void FeatureMap::validate() const {
  if (height <= 0 || width <= 0 || dim <= 0) {
    throw DimensionError("feature map dimensions must be positive");
  }
  if (data.size() != static_cast<std::size_t>(height) * width * dim) {
    throw DimensionError("feature map payload does not match its dimensions");
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw DimensionError("feature map entries must be finite");
    }
  }
}

double FeatureVec::norm() const {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

double cosine_similarity(const FeatureVec& a, const FeatureVec& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("cosine similarity requires equal dimensions");
  }
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw UndefinedCosineError("cosine similarity of a zero-norm vector");
  }
  double dot = 0.0;
  for (int i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
  return dot / (na * nb);
}

void FusionConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0) {
    throw ConfigurationError("fusion gamma must lie in [0, 1]");
  }
  if (tau < -1.0 || tau > 1.0) {
    throw ConfigurationError("fusion tau must lie in [-1, 1]");
  }
  if (!(beta > 0.0)) {
    throw ConfigurationError("fusion beta must be positive");
  }
}

Mask resize_mask_nearest(const Mask& m, int new_width, int new_height) {
  if (new_width <= 0 || new_height <= 0) {
    throw DimensionError("resize target must be positive");
  }
  auto src = m.to_grid();
  std::vector<std::uint8_t> dst(
      static_cast<std::size_t>(new_width) * new_height, 0);
  for (int x = 0; x < new_width; ++x) {
    int sx = std::min(m.width() - 1,
                      static_cast<int>((x + 0.5) * m.width() / new_width));
    for (int y = 0; y < new_height; ++y) {
      int sy = std::min(m.height() - 1,
                        static_cast<int>((y + 0.5) * m.height() / new_height));
      dst[static_cast<std::size_t>(x) * new_height + y] =
          src[static_cast<std::size_t>(sx) * m.height() + sy];
    }
  }
  return Mask::from_grid(new_width, new_height, dst);
}

FeatureVec pool_object_feature(const FeatureMap& fc, const Mask& m,
                               PoolMode mode) {
  Mask resized = (m.width() == fc.width && m.height() == fc.height)
                     ? m
                     : resize_mask_nearest(m, fc.width, fc.height);
  if (resized.area() == 0) {
    throw EmptyMaskError("mask is empty after resizing to the feature map");
  }
  FeatureVec out;
  out.kind = FeatureKind::Object;
  out.values.assign(fc.dim, 0.0);
  auto grid = resized.to_grid();
  for (int x = 0; x < fc.width; ++x) {
    for (int y = 0; y < fc.height; ++y) {
      if (!grid[static_cast<std::size_t>(x) * fc.height + y]) continue;
      for (int d = 0; d < fc.dim; ++d) {
        out.values[d] += fc.at(y, x, d);
      }
    }
  }
  double denom = mode == PoolMode::ForegroundMean
                     ? static_cast<double>(resized.area())
                     : static_cast<double>(fc.width) * fc.height;
  for (double& v : out.values) v /= denom;
  return out;
}

namespace {

// Bilinear sample with border clamping; grid values sit at integer
// coordinates (the torchvision ROIAlign convention).
double bilinear(const FeatureMap& map, double y, double x, int d) {
  if (y < -1.0 || y > map.height || x < -1.0 || x > map.width) return 0.0;
  y = std::max(y, 0.0);
  x = std::max(x, 0.0);
  int y0 = static_cast<int>(y);
  int x0 = static_cast<int>(x);
  int y1 = y0 + 1, x1 = x0 + 1;
  if (y0 >= map.height - 1) { y0 = y1 = map.height - 1; y = y0; }
  if (x0 >= map.width - 1) { x0 = x1 = map.width - 1; x = x0; }
  double ly = y - y0, lx = x - x0;
  double hy = 1.0 - ly, hx = 1.0 - lx;
  return hy * hx * map.at(y0, x0, d) + hy * lx * map.at(y0, x1, d) +
         ly * hx * map.at(y1, x0, d) + ly * lx * map.at(y1, x1, d);
}

constexpr int kRoiGrid = 7;
constexpr int kRoiSamples = 2;  // 2x2 samples per grid cell

}  // namespace

FeatureVec pool_human_query(const std::vector<FeatureMap>& fc_slices,
                            const Box& hbox) {
  if (fc_slices.empty()) {
    throw DimensionError("human query pooling needs at least one slice");
  }
  const FeatureMap& first = fc_slices.front();
  first.validate();
  for (const FeatureMap& s : fc_slices) {
    if (s.height != first.height || s.width != first.width ||
        s.dim != first.dim) {
      throw DimensionError("temporal slices must share dimensions");
    }
  }
  if (hbox.x2 <= 0.0 || hbox.y2 <= 0.0 || hbox.x1 >= first.width ||
      hbox.y1 >= first.height) {
    throw OutOfBoundsError("human box lies entirely outside the feature map");
  }

  FeatureMap mean = first;
  if (fc_slices.size() > 1) {
    for (std::size_t s = 1; s < fc_slices.size(); ++s) {
      for (std::size_t i = 0; i < mean.data.size(); ++i) {
        mean.data[i] += fc_slices[s].data[i];
      }
    }
    double inv = 1.0 / static_cast<double>(fc_slices.size());
    for (double& v : mean.data) v *= inv;
  }

  double bin_w = hbox.width() / kRoiGrid;
  double bin_h = hbox.height() / kRoiGrid;
  FeatureVec out;
  out.kind = FeatureKind::HumanQuery;
  out.values.assign(mean.dim, 0.0);
  for (int by = 0; by < kRoiGrid; ++by) {
    for (int bx = 0; bx < kRoiGrid; ++bx) {
      for (int sy = 0; sy < kRoiSamples; ++sy) {
        for (int sx = 0; sx < kRoiSamples; ++sx) {
          double y = hbox.y1 + (by + (sy + 0.5) / kRoiSamples) * bin_h - 0.5;
          double x = hbox.x1 + (bx + (sx + 0.5) / kRoiSamples) * bin_w - 0.5;
          for (int d = 0; d < mean.dim; ++d) {
            out.values[d] += bilinear(mean, y, x, d);
          }
        }
      }
    }
  }
  double inv = 1.0 / (kRoiGrid * kRoiGrid * kRoiSamples * kRoiSamples);
  for (double& v : out.values) v *= inv;
  return out;
}

std::vector<std::size_t> match_gt_masks(const std::vector<Mask>& proposals,
                                        const Mask& accurate,
                                        std::vector<std::string>* warnings) {
  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const Mask& p = proposals[i];
    if (p.width() != accurate.width() || p.height() != accurate.height()) {
      throw DimensionError("proposal and accurate masks differ in shape");
    }
    if (p.area() == 0) {
      if (warnings) {
        warnings->push_back("proposal " + std::to_string(i) +
                            " has zero area, skipped");
      }
      continue;
    }
    double ratio = static_cast<double>(mask_intersection_area(p, accurate)) /
                   static_cast<double>(p.area());
    if (ratio > 0.9) matched.push_back(i);
  }
  return matched;
}

std::vector<ScoredMask> score_masks(const FeatureVec& fq,
                                    const std::vector<FeatureVec>& mask_feats,
                                    const std::vector<Box>& mask_boxes,
                                    const Box& hbox, const FusionConfig& cfg) {
  cfg.validate();
  if (mask_feats.size() != mask_boxes.size()) {
    throw DimensionError("mask features and boxes must be parallel");
  }
  std::vector<ScoredMask> scored;
  scored.reserve(mask_feats.size());
  for (std::size_t i = 0; i < mask_feats.size(); ++i) {
    ScoredMask s;
    s.index = i;
    s.s_m = cosine_similarity(fq, mask_feats[i]);
    s.s_d = giou(hbox, mask_boxes[i]);
    s.s_f = cfg.gamma * s.s_m + (1.0 - cfg.gamma) * s.s_d;
    scored.push_back(s);
  }
  return scored;
}

std::vector<std::size_t> select_masks(const std::vector<ScoredMask>& scored,
                                      const FusionConfig& cfg) {
  if (scored.empty()) {
    throw NoCandidatesError("no scored masks to select from");
  }
  std::vector<std::size_t> out;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].s_f > cfg.tau) out.push_back(i);
    if (scored[i].s_f > scored[argmax].s_f) argmax = i;
  }
  if (out.empty()) out.push_back(argmax);
  return out;
}

double depth_mode(const Mask& m, double bin_width) {
  if (!m.has_depth()) {
    throw MissingDepthError("mask carries no depth values");
  }
  // bin -> (count, smallest depth seen in the bin); ordered map so the
  // tie-break to the smaller depth is a simple in-order scan.
  std::map<long long, std::pair<std::size_t, double>> bins;
  for (float fd : m.depth()) {
    double d = fd;
    long long bin = static_cast<long long>(std::floor(d / bin_width));
    auto [it, inserted] = bins.try_emplace(bin, 0, d);
    it->second.first += 1;
    it->second.second = std::min(it->second.second, d);
  }
  std::size_t best_count = 0;
  double best_depth = 0.0;
  for (const auto& [bin, entry] : bins) {
    if (entry.first > best_count) {
      best_count = entry.first;
      best_depth = entry.second;
    }
  }
  return best_depth;
}

std::vector<BoxPrediction> generate_boxes(const std::vector<Mask>& masks,
                                          const std::vector<ScoredMask>& scored,
                                          const std::vector<std::size_t>& selected,
                                          const FusionConfig& cfg,
                                          bool use_depth) {
  if (selected.empty()) {
    throw NoCandidatesError("cannot generate boxes from an empty selection");
  }
  auto score_of = [&](std::size_t idx) { return scored[idx].s_f; };

  std::size_t top = selected.front();
  Box box_a = mask_to_box(masks[selected.front()]);
  for (std::size_t idx : selected) {
    box_a = Box::hull(box_a, mask_to_box(masks[idx]));
    if (score_of(idx) > score_of(top) ||
        (score_of(idx) == score_of(top) && idx < top)) {
      top = idx;
    }
  }
  double confidence = score_of(top);

  if (!use_depth) {
    return {BoxPrediction{box_a, confidence}};
  }

  double top_mode = depth_mode(masks[top]);
  Box box_b = mask_to_box(masks[top]);
  for (std::size_t idx : selected) {
    if (idx == top) continue;
    if (std::abs(depth_mode(masks[idx]) - top_mode) < cfg.beta) {
      box_b = Box::hull(box_b, mask_to_box(masks[idx]));
    }
  }
  return {BoxPrediction{box_b, confidence},
          BoxPrediction{box_a, confidence * 0.99}};
}

double weighted_bce(const std::vector<double>& predictions,
                    const std::vector<int>& labels, double pos_weight) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("predictions and labels must have equal length");
  }
  if (predictions.empty()) {
    throw DimensionError("weighted bce needs at least one prediction");
  }
  constexpr double kEps = 1e-7;
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double p = std::clamp(predictions[i], kEps, 1.0 - kEps);
    if (labels[i]) {
      total -= pos_weight * std::log(p);
    } else {
      total -= std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(predictions.size());
}

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (int i = 0; i <= 10; ++i) g.gammas.push_back(i / 10.0);
  for (int i = -2; i <= 8; ++i) g.taus.push_back(i / 10.0);
  g.betas = {0.1, 0.25, 0.5, 1.0};
  return g;
}

GridSearchResult grid_search(
    const std::function<double(const FusionConfig&)>& eval_fn,
    const GridSpec& grid, int threads) {
  if (grid.gammas.empty() || grid.taus.empty() || grid.betas.empty()) {
    throw ConfigurationError("grid search requires a non-empty grid");
  }
  std::vector<FusionConfig> cells;
  for (double g : grid.gammas) {
    for (double t : grid.taus) {
      for (double b : grid.betas) {
        FusionConfig c;
        c.gamma = g;
        c.tau = t;
        c.beta = b;
        c.validate();
        cells.push_back(c);
      }
    }
  }
  std::vector<double> metrics(cells.size());
  parallel_for(cells.size(), threads,
               [&](std::size_t i) { metrics[i] = eval_fn(cells[i]); });
  // Cells are in lexicographic (gamma, tau, beta) order; strict comparison
  // keeps the first (smallest) maximizer.
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (metrics[i] > metrics[best]) best = i;
  }
  return GridSearchResult{cells[best], metrics[best]};
}

}  // namespace stgt
