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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stgt/geometry.hpp"

namespace stgt {

struct TrackletFrame {
  std::int64_t ts = 0;  // keyframe timestamp, integral seconds
  Box box;
  double score = 0.0;  // per-frame confidence; unused on ground truth
};

/// A timestamped sequence of per-keyframe boxes for one instance at
/// 1-second stride. Timestamps must be strictly increasing.
struct Tracklet {
  std::string video_id;
  std::int64_t instance_id = 0;
  std::string verb;
  std::vector<TrackletFrame> frames;

  /// Ranking score of a prediction tracklet: mean of its frame scores.
  double score() const;
  void validate() const;
};

/// One annotated unit: a human tracklet, its interaction verb, and the
/// ground-truth object tracklet(s). Each object tracklet is evaluated as its
/// own instance.
struct GroundingInstance {
  std::string video_id;
  std::int64_t instance_id = 0;
  std::string verb;
  Tracklet human;
  std::vector<Tracklet> objects;
};

enum class IouAggregation {
  Mean,          // mean box IoU over GT keyframes (default)
  MaxOverFrames, // largest per-frame IoU
};

/// Tracklet-level IoU: per GT keyframe, the box IoU against the prediction
/// at the same timestamp (0 when the prediction misses the timestamp),
/// aggregated per `agg`.
double tracklet_iou(const Tracklet& gt, const Tracklet& pred,
                    IouAggregation agg = IouAggregation::Mean);

/// Rank-reciprocal AP: 1/rank of the first prediction (sorted by score
/// descending, stable) whose tracklet IoU strictly exceeds iou_thresh;
/// 0 when none does or when preds is empty.
double instance_ap(const Tracklet& gt, const std::vector<Tracklet>& preds,
                   double iou_thresh,
                   IouAggregation agg = IouAggregation::Mean,
                   std::vector<std::string>* warnings = nullptr);

/// Rank-weighted mean IoU with weights 1/rank over score-sorted predictions.
double weighted_miou(const Tracklet& gt, const std::vector<Tracklet>& preds,
                     IouAggregation agg = IouAggregation::Mean,
                     std::vector<std::string>* warnings = nullptr);

enum class SizeBin { Small, Medium, Large, Unbinned };
enum class DistanceBin { Far, Medium, Close, Unbinned };

std::string size_bin_name(SizeBin b);
std::string distance_bin_name(DistanceBin b);

/// Assigns a GT instance to fine-grained bins from its object/human area
/// ratio (small <= 0.3 < medium <= 1.0 < large) and mean GIoU proximity
/// (far <= 0.04 < medium <= 0.22 < close), averaged over shared keyframes.
/// Instances without shared keyframes are unbinned.
std::pair<SizeBin, DistanceBin> bin_instance(const Tracklet& gt,
                                             const Tracklet& human);

struct EvalOptions {
  std::vector<double> iou_thresholds{0.5, 0.6, 0.7, 0.8, 0.9};
  IouAggregation aggregation = IouAggregation::Mean;
  int threads = 1;
};

struct BinBreakdown {
  int count = 0;
  double map50 = 0.0;
  double miou_w = 0.0;
};

struct EvalReport {
  std::map<double, double> map;  // threshold -> mAP
  double miou_w = 0.0;
  int total_instances = 0;
  int instances_without_predictions = 0;
  std::map<std::string, BinBreakdown> size_bins;      // small/medium/large
  std::map<std::string, BinBreakdown> distance_bins;  // far/medium/close
  int unbinned = 0;
  std::string mode;  // producer note, e.g. "with-depth" or "2d-only"
  std::vector<std::string> warnings;
};

/// Evaluates predictions against ground truth. Predictions associate to GT
/// instances by (video id, instance id, verb); every GT object tracklet is
/// one evaluated instance. Instances with no associated predictions count
/// as AP 0 and weighted mIoU 0.
EvalReport evaluate(const std::vector<GroundingInstance>& gt_set,
                    const std::vector<Tracklet>& pred_set,
                    const EvalOptions& options = {});

}  // namespace stgt
