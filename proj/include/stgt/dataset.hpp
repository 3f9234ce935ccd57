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

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "stgt/config.hpp"
#include "stgt/geometry.hpp"
#include "stgt/layout4d.hpp"
#include "stgt/metrics.hpp"
#include "stgt/splitter.hpp"
#include "stgt/taxonomy.hpp"

namespace stgt {

/// The 51 interaction classes annotations may carry.
const std::vector<std::string>& interaction_classes();
bool is_interaction_class(const std::string& verb);

/// Candidate masks for one keyframe plus the accurate (GT-prompted) masks
/// per annotated instance.
struct CandidateSet {
  std::string video_id;
  std::int64_t ts = 0;
  int width = 0;
  int height = 0;
  std::vector<Mask> masks;
  /// instance id -> one accurate mask per GT object tracklet
  std::map<std::int64_t, std::vector<Mask>> accurate;

  bool any_depth() const;
};

struct CloudRecord {
  std::string video_id;
  std::int64_t instance_id = 0;
  std::int64_t ts = 0;
  CloudRole role = CloudRole::Scene;
  PointCloud cloud;
  Vec3 pelvis{};
  std::filesystem::path tensor_path;
};

struct Dataset {
  std::filesystem::path root;
  int image_width = 0;
  int image_height = 0;
  std::vector<GroundingInstance> annotations;
  std::map<std::pair<std::string, std::int64_t>, CandidateSet> candidates;
  std::map<std::pair<std::string, std::int64_t>, FeatureMap> context;
  std::map<std::tuple<std::string, std::int64_t, std::int64_t>,
           std::vector<FeatureVec>> queries;
  std::vector<CloudRecord> clouds;
  bool has_features = false;
  bool has_depth = false;
  bool has_clouds = false;
};

/// Loads and cross-links a dataset directory; every keyframe referenced by
/// an annotation must have its candidate file (and feature files when the
/// manifest declares them). Validation errors name the offending file.
Dataset load_dataset(const std::filesystem::path& root, const RunConfig& cfg,
                     std::vector<std::string>* warnings = nullptr);

// ---- annotations (JSONL, one grounding instance per line) ----
std::vector<GroundingInstance> load_annotations(
    const std::filesystem::path& path);
void save_annotations(const std::filesystem::path& path,
                      const std::vector<GroundingInstance>& annotations);

// ---- predictions (JSONL, one tracklet per line) ----
std::vector<Tracklet> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path,
                      const std::vector<Tracklet>& predictions);

// ---- candidate files ----
CandidateSet load_candidates(const std::filesystem::path& path, int mask_cap,
                             std::vector<std::string>* warnings = nullptr);
void save_candidates(const std::filesystem::path& path,
                     const CandidateSet& set);

// ---- clouds ----
CloudRecord load_cloud(const std::filesystem::path& tensor_path);
void save_cloud(const std::filesystem::path& tensor_path,
                const CloudRecord& record);

// ---- evaluation reports ----
void save_report(const std::filesystem::path& path, const EvalReport& report,
                 const std::string& label);
void save_report_csv(const std::filesystem::path& path,
                     const EvalReport& report, const std::string& label);

// ---- split problems / solutions ----
SplitProblem load_split_problem(const std::filesystem::path& path);
void save_split_problem(const std::filesystem::path& path,
                        const SplitProblem& p);
void save_split_solution(const std::filesystem::path& path,
                         const SplitProblem& p, const SplitSolution& s);

// ---- taxonomy files ----
TaxonomyGraph load_taxonomy_graph(const std::filesystem::path& tsv_path);
std::vector<std::string> load_word_list(const std::filesystem::path& path);
TaxonomyOverrides load_overrides(const std::filesystem::path& path);
void save_clusters(const std::filesystem::path& path,
                   const std::vector<Cluster>& clusters);
void save_tree(const std::filesystem::path& path, const ClassTree& tree);
void save_trees(const std::filesystem::path& path,
                const std::vector<ClassTree>& trees);
std::string tree_outline(const ClassTree& tree);

}  // namespace stgt
