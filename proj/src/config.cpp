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

#include "stgt/config.hpp"

#include <fstream>

#include <json.hpp>

namespace stgt {

int RunConfig::effective_mask_cap(std::vector<std::string>* warnings) const {
  if (max_masks > kMaskCap) {
    if (warnings) {
      warnings->push_back("max_masks " + std::to_string(max_masks) +
                          " exceeds the per-keyframe cap, clipped to " +
                          std::to_string(kMaskCap));
    }
    return kMaskCap;
  }
  return max_masks;
}

void RunConfig::validate() const {
  fusion.validate();
  bps.validate();
  if (feature_dim <= 0) throw ConfigurationError("feature_dim must be positive");
  if (max_masks <= 0) throw ConfigurationError("max_masks must be positive");
  if (num_queries <= 0) throw ConfigurationError("num_queries must be positive");
  if (num_3d_slots <= 0) throw ConfigurationError("num_3d_slots must be positive");
  if (pos_weight <= 0.0) throw ConfigurationError("pos_weight must be positive");
  if (iou_thresholds.empty()) {
    throw ConfigurationError("at least one IoU threshold is required");
  }
  for (double t : iou_thresholds) {
    if (t <= 0.0 || t >= 1.0) {
      throw ConfigurationError("IoU thresholds must lie in (0, 1)");
    }
  }
}

std::string pool_mode_name(PoolMode mode) {
  return mode == PoolMode::ForegroundMean ? "foreground-mean" : "all-cells";
}

PoolMode pool_mode_from_name(const std::string& name) {
  if (name == "foreground-mean") return PoolMode::ForegroundMean;
  if (name == "all-cells") return PoolMode::AllCells;
  throw ConfigurationError("unknown pool mode: " + name);
}

std::string aggregation_name(IouAggregation agg) {
  return agg == IouAggregation::Mean ? "mean" : "max";
}

IouAggregation aggregation_from_name(const std::string& name) {
  if (name == "mean") return IouAggregation::Mean;
  if (name == "max") return IouAggregation::MaxOverFrames;
  throw ConfigurationError("unknown IoU aggregation: " + name);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string(), std::string("bad config json: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("fusion")) {
      const auto& f = j["fusion"];
      cfg.fusion.gamma = f.value("gamma", cfg.fusion.gamma);
      cfg.fusion.tau = f.value("tau", cfg.fusion.tau);
      cfg.fusion.beta = f.value("beta", cfg.fusion.beta);
    }
    if (j.contains("bps")) {
      const auto& b = j["bps"];
      cfg.bps.feature_dim = b.value("feature_dim", cfg.bps.feature_dim);
      cfg.bps.radius_factor = b.value("radius_factor", cfg.bps.radius_factor);
      cfg.bps.seed = b.value("seed", cfg.bps.seed);
    }
    if (j.contains("metrics")) {
      const auto& m = j["metrics"];
      if (m.contains("iou_thresholds")) {
        cfg.iou_thresholds = m["iou_thresholds"].get<std::vector<double>>();
      }
      if (m.contains("aggregation")) {
        cfg.aggregation = aggregation_from_name(m["aggregation"].get<std::string>());
      }
    }
    if (j.contains("pool_mode")) {
      cfg.pool_mode = pool_mode_from_name(j["pool_mode"].get<std::string>());
    }
    cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
    cfg.max_masks = j.value("max_masks", cfg.max_masks);
    cfg.num_queries = j.value("num_queries", cfg.num_queries);
    cfg.num_3d_slots = j.value("num_3d_slots", cfg.num_3d_slots);
    cfg.pos_weight = j.value("pos_weight", cfg.pos_weight);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string(), std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  nlohmann::json j;
  j["fusion"] = {{"gamma", cfg.fusion.gamma},
                 {"tau", cfg.fusion.tau},
                 {"beta", cfg.fusion.beta}};
  j["bps"] = {{"feature_dim", cfg.bps.feature_dim},
              {"radius_factor", cfg.bps.radius_factor},
              {"seed", cfg.bps.seed}};
  j["metrics"] = {{"iou_thresholds", cfg.iou_thresholds},
                  {"aggregation", aggregation_name(cfg.aggregation)}};
  j["pool_mode"] = pool_mode_name(cfg.pool_mode);
  j["feature_dim"] = cfg.feature_dim;
  j["max_masks"] = cfg.max_masks;
  j["num_queries"] = cfg.num_queries;
  j["num_3d_slots"] = cfg.num_3d_slots;
  j["pos_weight"] = cfg.pos_weight;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write config: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace stgt
