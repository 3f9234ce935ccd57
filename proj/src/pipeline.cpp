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

#include "stgt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stgt/parallel.hpp"

namespace stgt {

namespace {

struct InstanceOutput {
  std::vector<Tracklet> predictions;
  std::vector<std::string> diagnostics;
  bool failed = false;
};

InstanceOutput ground_instance(const Dataset& ds, const RunConfig& cfg,
                               const GroundingInstance& inst) {
  InstanceOutput out;
  Tracklet depth_pred, union_pred;
  for (Tracklet* t : {&depth_pred, &union_pred}) {
    t->video_id = inst.video_id;
    t->instance_id = inst.instance_id;
    t->verb = inst.verb;
  }

  try {
    for (const TrackletFrame& hframe : inst.human.frames) {
      const CandidateSet& cands =
          ds.candidates.at({inst.video_id, hframe.ts});
      if (cands.masks.empty()) {
        out.diagnostics.push_back(inst.video_id + " ts=" +
                                  std::to_string(hframe.ts) +
                                  ": no candidate masks");
        continue;
      }

      // Pool features and boxes for scoreable (non-empty) candidates.
      std::vector<FeatureVec> feats;
      std::vector<Box> boxes;
      std::vector<Mask> masks;
      const FeatureMap* fc = nullptr;
      if (ds.has_features) {
        fc = &ds.context.at({inst.video_id, hframe.ts});
      }
      for (std::size_t i = 0; i < cands.masks.size(); ++i) {
        const Mask& m = cands.masks[i];
        if (m.area() == 0) continue;
        if (fc != nullptr) {
          try {
            feats.push_back(pool_object_feature(*fc, m, cfg.pool_mode));
          } catch (const EmptyMaskError&) {
            continue;  // vanishes at feature-map resolution
          }
        }
        boxes.push_back(mask_to_box(m));
        masks.push_back(m);
      }
      if (masks.empty()) {
        out.diagnostics.push_back(inst.video_id + " ts=" +
                                  std::to_string(hframe.ts) +
                                  ": no usable candidate masks");
        continue;
      }

      // Score with every decoder query and union the per-query selections,
      // keeping each mask's best fused score across queries.
      std::vector<ScoredMask> best;
      std::vector<bool> chosen(masks.size(), false);
      auto fold = [&](const std::vector<ScoredMask>& scored) {
        for (std::size_t i : select_masks(scored, cfg.fusion)) {
          chosen[i] = true;
        }
        if (best.empty()) {
          best = scored;
          return;
        }
        for (std::size_t i = 0; i < scored.size(); ++i) {
          if (scored[i].s_f > best[i].s_f) best[i] = scored[i];
        }
      };
      if (fc != nullptr) {
        const auto& queries =
            ds.queries.at({inst.video_id, inst.instance_id, hframe.ts});
        if (queries.empty()) {
          throw ConfigurationError("instance carries no query vectors");
        }
        for (const FeatureVec& q : queries) {
          fold(score_masks(q, feats, boxes, hframe.box, cfg.fusion));
        }
      } else {
        // No feature files: proximity-only scoring (gamma plays no role).
        std::vector<ScoredMask> scored;
        for (std::size_t i = 0; i < masks.size(); ++i) {
          ScoredMask s;
          s.index = i;
          s.s_d = giou(hframe.box, boxes[i]);
          s.s_f = s.s_d;
          scored.push_back(s);
        }
        fold(scored);
      }

      std::vector<std::size_t> selected;
      for (std::size_t i = 0; i < masks.size(); ++i) {
        if (chosen[i]) selected.push_back(i);
      }

      bool use_depth = !selected.empty();
      for (std::size_t i : selected) {
        if (!masks[i].has_depth()) use_depth = false;
      }
      for (std::size_t i = 0; i < masks.size(); ++i) {
        if (masks[i].has_depth()) best[i].depth_mode = depth_mode(masks[i]);
      }

      auto preds = generate_boxes(masks, best, selected, cfg.fusion, use_depth);
      if (preds.size() == 2) {
        depth_pred.frames.push_back({hframe.ts, preds[0].box, preds[0].score});
        union_pred.frames.push_back({hframe.ts, preds[1].box, preds[1].score});
      } else {
        union_pred.frames.push_back({hframe.ts, preds[0].box, preds[0].score});
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.diagnostics.push_back("instance " + inst.video_id + "/" +
                              std::to_string(inst.instance_id) +
                              " failed: " + e.what());
    return out;
  }

  if (!depth_pred.frames.empty()) out.predictions.push_back(depth_pred);
  if (!union_pred.frames.empty()) out.predictions.push_back(union_pred);
  return out;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& ds, const RunConfig& cfg,
                            int threads) {
  cfg.validate();
  PipelineResult result;
  result.mode = ds.has_depth ? "with-depth" : "2d-only";
  if (!ds.has_features) result.mode += "+giou-only";

  std::vector<InstanceOutput> outputs(ds.annotations.size());
  parallel_for(ds.annotations.size(), threads, [&](std::size_t i) {
    outputs[i] = ground_instance(ds, cfg, ds.annotations[i]);
  });

  for (InstanceOutput& o : outputs) {
    if (o.failed) ++result.failed_instances;
    for (Tracklet& t : o.predictions) {
      result.predictions.push_back(std::move(t));
    }
    for (std::string& d : o.diagnostics) {
      result.diagnostics.push_back(std::move(d));
    }
  }

  EvalOptions opts;
  opts.iou_thresholds = cfg.iou_thresholds;
  opts.aggregation = cfg.aggregation;
  opts.threads = threads;
  result.report = evaluate(ds.annotations, result.predictions, opts);
  result.report.mode = result.mode;
  return result;
}

GridSearchResult tune(const Dataset& ds, const RunConfig& base,
                      const GridSpec& grid, int threads) {
  double target = base.iou_thresholds.front();
  for (double t : base.iou_thresholds) {
    if (t == 0.5) target = 0.5;
  }
  auto eval_fn = [&](const FusionConfig& cell) {
    RunConfig cfg = base;
    cfg.fusion = cell;
    PipelineResult r = run_pipeline(ds, cfg, 1);
    return r.report.map.at(target);
  };
  return grid_search(eval_fn, grid, threads);
}

}  // namespace stgt
