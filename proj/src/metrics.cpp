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

#include "stgt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "stgt/parallel.hpp"

namespace stgt {

double Tracklet::score() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const TrackletFrame& f : frames) sum += f.score;
  return sum / static_cast<double>(frames.size());
}

void Tracklet::validate() const {
  if (frames.empty()) {
    throw ValidationError(video_id, "tracklet has no frames");
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].ts <= frames[i - 1].ts) {
      throw ValidationError(video_id,
                            "tracklet timestamps must strictly increase");
    }
  }
  for (const TrackletFrame& f : frames) {
    if (!f.box.valid()) {
      throw ValidationError(video_id, "tracklet contains an invalid box");
    }
  }
}

namespace {

double frame_iou(const Box& a, const Box& b) {
  // Degenerate-vs-degenerate pairs contribute zero instead of aborting an
  // evaluation batch.
  if (a.degenerate() && b.degenerate()) return 0.0;
  return iou(a, b);
}

std::vector<std::size_t> rank_by_score(const std::vector<Tracklet>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return preds[a].score() > preds[b].score();
                   });
  return order;
}

}  // namespace

double tracklet_iou(const Tracklet& gt, const Tracklet& pred,
                    IouAggregation agg) {
  std::unordered_map<std::int64_t, const Box*> pred_boxes;
  for (const TrackletFrame& f : pred.frames) pred_boxes[f.ts] = &f.box;

  double sum = 0.0;
  double best = 0.0;
  for (const TrackletFrame& f : gt.frames) {
    auto it = pred_boxes.find(f.ts);
    double v = it == pred_boxes.end() ? 0.0 : frame_iou(f.box, *it->second);
    sum += v;
    best = std::max(best, v);
  }
  if (gt.frames.empty()) return 0.0;
  return agg == IouAggregation::Mean
             ? sum / static_cast<double>(gt.frames.size())
             : best;
}

double instance_ap(const Tracklet& gt, const std::vector<Tracklet>& preds,
                   double iou_thresh, IouAggregation agg,
                   std::vector<std::string>* warnings) {
  if (preds.empty()) {
    if (warnings) {
      warnings->push_back("no predictions for instance " + gt.video_id + "/" +
                          std::to_string(gt.instance_id));
    }
    return 0.0;
  }
  auto order = rank_by_score(preds);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (tracklet_iou(gt, preds[order[rank]], agg) > iou_thresh) {
      return 1.0 / static_cast<double>(rank + 1);
    }
  }
  return 0.0;
}

double weighted_miou(const Tracklet& gt, const std::vector<Tracklet>& preds,
                     IouAggregation agg, std::vector<std::string>* warnings) {
  if (preds.empty()) {
    if (warnings) {
      warnings->push_back("no predictions for instance " + gt.video_id + "/" +
                          std::to_string(gt.instance_id));
    }
    return 0.0;
  }
  auto order = rank_by_score(preds);
  double num = 0.0, den = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    double w = 1.0 / static_cast<double>(rank + 1);
    num += w * tracklet_iou(gt, preds[order[rank]], agg);
    den += w;
  }
  return num / den;
}

std::string size_bin_name(SizeBin b) {
  switch (b) {
    case SizeBin::Small: return "small";
    case SizeBin::Medium: return "medium";
    case SizeBin::Large: return "large";
    case SizeBin::Unbinned: return "unbinned";
  }
  return "unbinned";
}

std::string distance_bin_name(DistanceBin b) {
  switch (b) {
    case DistanceBin::Far: return "far";
    case DistanceBin::Medium: return "medium";
    case DistanceBin::Close: return "close";
    case DistanceBin::Unbinned: return "unbinned";
  }
  return "unbinned";
}

std::pair<SizeBin, DistanceBin> bin_instance(const Tracklet& gt,
                                             const Tracklet& human) {
  std::unordered_map<std::int64_t, const Box*> human_boxes;
  for (const TrackletFrame& f : human.frames) human_boxes[f.ts] = &f.box;

  double size_sum = 0.0, dist_sum = 0.0;
  int shared = 0;
  for (const TrackletFrame& f : gt.frames) {
    auto it = human_boxes.find(f.ts);
    if (it == human_boxes.end()) continue;
    const Box& hbox = *it->second;
    if (hbox.area() == 0.0) continue;
    size_sum += f.box.area() / hbox.area();
    dist_sum += giou(hbox, f.box);
    ++shared;
  }
  if (shared == 0) return {SizeBin::Unbinned, DistanceBin::Unbinned};

  double r_size = size_sum / shared;
  double r_dist = dist_sum / shared;
  SizeBin s = r_size <= 0.3   ? SizeBin::Small
              : r_size <= 1.0 ? SizeBin::Medium
                              : SizeBin::Large;
  DistanceBin d = r_dist <= 0.04   ? DistanceBin::Far
                  : r_dist <= 0.22 ? DistanceBin::Medium
                                   : DistanceBin::Close;
  return {s, d};
}

namespace {

struct InstanceEval {
  std::vector<double> ap;  // per threshold
  double miou_w = 0.0;
  SizeBin size = SizeBin::Unbinned;
  DistanceBin dist = DistanceBin::Unbinned;
  bool had_predictions = false;
};

}  // namespace

EvalReport evaluate(const std::vector<GroundingInstance>& gt_set,
                    const std::vector<Tracklet>& pred_set,
                    const EvalOptions& options) {
  // Group predictions by association key.
  std::map<std::tuple<std::string, std::int64_t, std::string>,
           std::vector<Tracklet>> by_key;
  for (const Tracklet& p : pred_set) {
    by_key[{p.video_id, p.instance_id, p.verb}].push_back(p);
  }
  static const std::vector<Tracklet> kNoPreds;

  struct Unit {
    const GroundingInstance* ann;
    const Tracklet* object;
    const std::vector<Tracklet>* preds;
  };
  std::vector<Unit> units;
  for (const GroundingInstance& ann : gt_set) {
    auto it = by_key.find({ann.video_id, ann.instance_id, ann.verb});
    const std::vector<Tracklet>* preds =
        it == by_key.end() ? &kNoPreds : &it->second;
    for (const Tracklet& obj : ann.objects) {
      units.push_back({&ann, &obj, preds});
    }
  }

  std::vector<InstanceEval> evals(units.size());
  parallel_for(units.size(), options.threads, [&](std::size_t i) {
    const Unit& u = units[i];
    InstanceEval& e = evals[i];
    e.had_predictions = !u.preds->empty();
    e.ap.reserve(options.iou_thresholds.size());
    for (double t : options.iou_thresholds) {
      e.ap.push_back(
          instance_ap(*u.object, *u.preds, t, options.aggregation, nullptr));
    }
    e.miou_w = weighted_miou(*u.object, *u.preds, options.aggregation, nullptr);
    auto [s, d] = bin_instance(*u.object, u.ann->human);
    e.size = s;
    e.dist = d;
  });

  EvalReport report;
  report.total_instances = static_cast<int>(units.size());
  for (const char* name : {"small", "medium", "large"}) {
    report.size_bins[name] = BinBreakdown{};
  }
  for (const char* name : {"far", "medium", "close"}) {
    report.distance_bins[name] = BinBreakdown{};
  }
  if (units.empty()) {
    for (double t : options.iou_thresholds) report.map[t] = 0.0;
    return report;
  }

  std::size_t map50_index = 0;
  for (std::size_t k = 0; k < options.iou_thresholds.size(); ++k) {
    if (options.iou_thresholds[k] == 0.5) map50_index = k;
  }

  for (std::size_t k = 0; k < options.iou_thresholds.size(); ++k) {
    double sum = 0.0;
    for (const InstanceEval& e : evals) sum += e.ap[k];
    report.map[options.iou_thresholds[k]] = sum / evals.size();
  }
  double miou_sum = 0.0;
  for (const InstanceEval& e : evals) miou_sum += e.miou_w;
  report.miou_w = miou_sum / evals.size();

  for (std::size_t i = 0; i < evals.size(); ++i) {
    const InstanceEval& e = evals[i];
    if (!e.had_predictions) {
      ++report.instances_without_predictions;
      report.warnings.push_back("no predictions for instance " +
                                units[i].ann->video_id + "/" +
                                std::to_string(units[i].ann->instance_id));
    }
    if (e.size == SizeBin::Unbinned) {
      ++report.unbinned;
      continue;
    }
    BinBreakdown& sb = report.size_bins[size_bin_name(e.size)];
    sb.count += 1;
    sb.map50 += e.ap[map50_index];
    sb.miou_w += e.miou_w;
    BinBreakdown& db = report.distance_bins[distance_bin_name(e.dist)];
    db.count += 1;
    db.map50 += e.ap[map50_index];
    db.miou_w += e.miou_w;
  }
  for (auto* bins : {&report.size_bins, &report.distance_bins}) {
    for (auto& [name, b] : *bins) {
      if (b.count > 0) {
        b.map50 /= b.count;
        b.miou_w /= b.count;
      }
    }
  }
  return report;
}

}  // namespace stgt
