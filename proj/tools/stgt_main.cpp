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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stgt/dataset.hpp"
#include "stgt/fixture.hpp"
#include "stgt/pipeline.hpp"
#include "stgt/tensor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

struct GlobalOptions {
  std::string config_path;
  int threads = 1;
  std::optional<std::uint64_t> seed;

  stgt::RunConfig load() const {
    if (config_path.empty()) return stgt::RunConfig{};
    return stgt::load_config(config_path);
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

void print_report_summary(const stgt::EvalReport& report) {
  for (const auto& [t, v] : report.map) {
    std::cout << "mAP@" << t << " = " << v << "\n";
  }
  std::cout << "mIoU_w = " << report.miou_w << "\n";
  std::cout << "instances = " << report.total_instances
            << " (unbinned " << report.unbinned << ")\n";
  if (!report.mode.empty()) std::cout << "mode = " << report.mode << "\n";
}

int cmd_evaluate(const GlobalOptions& g, const std::string& gt_path,
                 const std::string& pred_path, const std::string& out_path,
                 const std::string& csv_path, const std::string& label,
                 const std::string& agg) {
  stgt::RunConfig cfg = g.load();
  auto gt = stgt::load_annotations(gt_path);
  auto preds = stgt::load_predictions(pred_path);
  stgt::EvalOptions opts;
  opts.iou_thresholds = cfg.iou_thresholds;
  opts.aggregation = stgt::aggregation_from_name(agg);
  opts.threads = g.threads;
  stgt::EvalReport report = stgt::evaluate(gt, preds, opts);
  print_warnings(report.warnings);
  if (!out_path.empty()) stgt::save_report(out_path, report, label);
  if (!csv_path.empty()) stgt::save_report_csv(csv_path, report, label);
  print_report_summary(report);
  return 0;
}

int cmd_ground(const GlobalOptions& g, const std::string& dataset_dir,
               const std::string& out_path, const std::string& report_path,
               const std::string& csv_path, const std::string& label) {
  stgt::RunConfig cfg = g.load();
  std::vector<std::string> warnings;
  stgt::Dataset ds = stgt::load_dataset(dataset_dir, cfg, &warnings);
  print_warnings(warnings);
  stgt::PipelineResult result = stgt::run_pipeline(ds, cfg, g.threads);
  print_warnings(result.diagnostics);
  stgt::save_predictions(out_path, result.predictions);
  if (!report_path.empty()) {
    stgt::save_report(report_path, result.report, label);
  }
  if (!csv_path.empty()) {
    stgt::save_report_csv(csv_path, result.report, label);
  }
  print_report_summary(result.report);
  if (result.failed_instances > 0) {
    std::cerr << result.failed_instances << " instance(s) failed\n";
    return kExitPartial;
  }
  return 0;
}

int cmd_match_gt(const GlobalOptions& g, const std::string& candidates_path,
                 std::int64_t instance, int object_index,
                 const std::string& out_path) {
  stgt::RunConfig cfg = g.load();
  std::vector<std::string> warnings;
  stgt::CandidateSet set = stgt::load_candidates(
      candidates_path, cfg.effective_mask_cap(&warnings), &warnings);
  auto it = set.accurate.find(instance);
  if (it == set.accurate.end()) {
    throw stgt::ValidationError(candidates_path,
                                "no accurate mask for instance " +
                                    std::to_string(instance));
  }
  if (object_index < 0 ||
      object_index >= static_cast<int>(it->second.size())) {
    throw stgt::ValidationError(candidates_path,
                                "no accurate mask for object index " +
                                    std::to_string(object_index));
  }
  const stgt::Mask& accurate = it->second[static_cast<std::size_t>(object_index)];
  auto matched = stgt::match_gt_masks(set.masks, accurate, &warnings);
  print_warnings(warnings);

  json out;
  out["video_id"] = set.video_id;
  out["ts"] = set.ts;
  out["instance"] = instance;
  out["object"] = object_index;
  out["matched"] = matched;
  json ratios = json::array();
  for (const stgt::Mask& m : set.masks) {
    if (m.area() == 0) {
      ratios.push_back(nullptr);
    } else {
      ratios.push_back(
          static_cast<double>(stgt::mask_intersection_area(m, accurate)) /
          static_cast<double>(m.area()));
    }
  }
  out["ratios"] = ratios;
  if (out_path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw stgt::IoError("cannot write " + out_path);
    f << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_align(const std::string& human_path, const std::string& scene_path,
              const std::string& out_path) {
  stgt::CloudRecord human = stgt::load_cloud(human_path);
  stgt::CloudRecord scene = stgt::load_cloud(scene_path);
  stgt::AlignmentTransform t =
      stgt::align_scene_to_human(human.cloud, scene.cloud);
  json out;
  out["scale"] = t.scale;
  out["displacement"] = {t.displacement.x, t.displacement.y, t.displacement.z};
  if (out_path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw stgt::IoError("cannot write " + out_path);
    f << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_bps(const GlobalOptions& g, const std::string& mesh_path,
            const std::string& scene_path, const std::string& front_path,
            const std::string& corresp_path, const std::string& out_path) {
  stgt::RunConfig cfg = g.load();
  if (g.seed) cfg.bps.seed = *g.seed;
  stgt::CloudRecord mesh = stgt::load_cloud(mesh_path);
  stgt::CloudRecord scene = stgt::load_cloud(scene_path);

  stgt::PointCloud scene_cloud = scene.cloud;
  if (!front_path.empty() || !corresp_path.empty()) {
    if (front_path.empty() || corresp_path.empty()) {
      throw stgt::ConfigurationError(
          "--human-front and --scene-corresp must be given together");
    }
    stgt::CloudRecord front = stgt::load_cloud(front_path);
    stgt::CloudRecord corresp = stgt::load_cloud(corresp_path);
    auto t = stgt::align_scene_to_human(front.cloud, corresp.cloud);
    scene_cloud = stgt::apply_alignment(scene_cloud, t);
  }

  double height = stgt::body_height(mesh.cloud);
  stgt::PointCloud base =
      stgt::generate_base_points(cfg.bps, mesh.pelvis, height);
  stgt::BpsFeature feat = stgt::bps_encode(base, mesh.cloud, scene_cloud);

  stgt::Tensor t;
  t.role = "bps";
  t.shape = {static_cast<std::int64_t>(feat.values.size())};
  t.attrs["variant"] = "norms";
  char pelvis[96];
  std::snprintf(pelvis, sizeof(pelvis), "%.17g %.17g %.17g", mesh.pelvis.x,
                mesh.pelvis.y, mesh.pelvis.z);
  t.attrs["pelvis"] = pelvis;
  t.data.assign(feat.values.begin(), feat.values.end());
  stgt::write_tensor(out_path, t);
  std::cout << "wrote " << feat.values.size() << " feature values\n";
  return 0;
}

int cmd_split(const GlobalOptions& g, const std::string& problem_path,
              const std::string& out_path, const std::string& mode,
              int iterations) {
  stgt::SplitProblem p = stgt::load_split_problem(problem_path);
  stgt::SplitSolution s;
  std::string chosen = mode;
  if (chosen == "auto") {
    chosen = p.video_count() <= 20 ? "exact" : "heuristic";
  }
  if (chosen == "exact") {
    s = stgt::solve_exact(p, g.threads);
  } else if (chosen == "heuristic") {
    s = stgt::solve_heuristic(p, g.seed.value_or(0), iterations);
  } else {
    throw stgt::ConfigurationError("unknown solver mode: " + mode);
  }
  stgt::save_split_solution(out_path, p, s);
  std::cout << (s.feasible ? "feasible" : "infeasible")
            << " objective = " << s.objective << " selected = " << s.selected.size()
            << " videos\n";
  return 0;
}

int cmd_taxonomy(const std::string& graph_path, const std::string& words_path,
                 const std::string& overrides_path,
                 const std::string& clusters_out, const std::string& trees_out,
                 const std::string& tree_out, const std::string& outline_out,
                 bool combine) {
  stgt::TaxonomyGraph graph = stgt::load_taxonomy_graph(graph_path);
  std::vector<std::string> words = stgt::load_word_list(words_path);
  stgt::TaxonomyOverrides overrides;
  if (!overrides_path.empty()) {
    overrides = stgt::load_overrides(overrides_path);
  }
  std::vector<std::string> warnings;
  auto clusters = stgt::cluster_classes(words, graph, overrides, &warnings);
  std::vector<stgt::ClassTree> trees;
  for (const stgt::Cluster& c : clusters) {
    trees.push_back(stgt::construct_tree(c, graph, overrides, &warnings));
  }
  print_warnings(warnings);

  if (!clusters_out.empty()) stgt::save_clusters(clusters_out, clusters);
  if (!trees_out.empty()) stgt::save_trees(trees_out, trees);

  if (combine || !tree_out.empty() || !outline_out.empty()) {
    stgt::ClassTree combined = trees.front();
    for (std::size_t i = 1; i < trees.size(); ++i) {
      combined = stgt::combine_trees(combined, trees[i], graph);
    }
    if (!tree_out.empty()) stgt::save_tree(tree_out, combined);
    if (!outline_out.empty()) {
      std::ofstream f(outline_out, std::ios::trunc);
      if (!f) throw stgt::IoError("cannot write " + outline_out);
      f << stgt::tree_outline(combined);
    }
  }
  std::cout << clusters.size() << " cluster(s) from " << words.size()
            << " word(s)\n";
  return 0;
}

int cmd_tune(const GlobalOptions& g, const std::string& dataset_dir,
             const std::string& out_path, const std::vector<double>& gammas,
             const std::vector<double>& taus, const std::vector<double>& betas) {
  stgt::RunConfig cfg = g.load();
  std::vector<std::string> warnings;
  stgt::Dataset ds = stgt::load_dataset(dataset_dir, cfg, &warnings);
  print_warnings(warnings);
  stgt::GridSpec grid = stgt::GridSpec::defaults();
  if (!gammas.empty()) grid.gammas = gammas;
  if (!taus.empty()) grid.taus = taus;
  if (!betas.empty()) grid.betas = betas;
  stgt::GridSearchResult result = stgt::tune(ds, cfg, grid, g.threads);
  cfg.fusion = result.best;
  stgt::save_config(out_path, cfg);
  std::cout << "best gamma=" << result.best.gamma << " tau=" << result.best.tau
            << " beta=" << result.best.beta << " metric=" << result.metric
            << "\n";
  return 0;
}

int cmd_fixture(const GlobalOptions& g, const std::string& out_dir,
                stgt::FixtureSpec spec) {
  stgt::RunConfig cfg = g.load();
  if (g.seed) spec.seed = *g.seed;
  stgt::generate_fixture(out_dir, spec, cfg);
  std::cout << "fixture written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic grounding, 4D layout encoding and evaluation "
               "toolkit for interacted-object tracklets"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration JSON");
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed override");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score predictions against GT");
  std::string ev_gt, ev_pred, ev_out, ev_csv, ev_label = "run", ev_agg = "mean";
  ev->add_option("--gt", ev_gt, "GT annotations JSONL")->required();
  ev->add_option("--pred", ev_pred, "Prediction JSONL")->required();
  ev->add_option("--out", ev_out, "Report JSON path");
  ev->add_option("--csv", ev_csv, "Report CSV path");
  ev->add_option("--label", ev_label, "Method label for the report");
  ev->add_option("--agg", ev_agg, "Tracklet IoU aggregation: mean|max");

  // ground
  auto* gr = app.add_subcommand("ground", "Run the grounding pipeline");
  std::string gr_dataset, gr_out, gr_report, gr_csv, gr_label = "run";
  gr->add_option("--dataset", gr_dataset, "Dataset directory")->required();
  gr->add_option("--out", gr_out, "Prediction JSONL path")->required();
  gr->add_option("--report", gr_report, "Report JSON path");
  gr->add_option("--csv", gr_csv, "Report CSV path");
  gr->add_option("--label", gr_label, "Method label for the report");

  // match-gt
  auto* mg = app.add_subcommand("match-gt",
                                "Match candidate masks against the accurate mask");
  std::string mg_candidates, mg_out;
  std::int64_t mg_instance = 0;
  int mg_object = 0;
  mg->add_option("--candidates", mg_candidates, "Candidate file")->required();
  mg->add_option("--instance", mg_instance, "Instance id")->required();
  mg->add_option("--object", mg_object, "GT object index");
  mg->add_option("--out", mg_out, "Output JSON (stdout when omitted)");

  // align
  auto* al = app.add_subcommand("align", "Recover the scene-to-human transform");
  std::string al_human, al_scene, al_out;
  al->add_option("--human", al_human, "Human front-surface cloud (.stgt)")
      ->required();
  al->add_option("--scene", al_scene, "Scene correspondence cloud (.stgt)")
      ->required();
  al->add_option("--out", al_out, "Output JSON (stdout when omitted)");

  // bps
  auto* bp = app.add_subcommand("bps", "Basis-point-set encoding of a layout");
  std::string bp_mesh, bp_scene, bp_front, bp_corresp, bp_out;
  bp->add_option("--human-mesh", bp_mesh, "Human mesh cloud (.stgt)")
      ->required();
  bp->add_option("--scene", bp_scene, "Scene cloud (.stgt)")->required();
  bp->add_option("--human-front", bp_front, "Front-surface cloud for alignment");
  bp->add_option("--scene-corresp", bp_corresp,
                 "Scene correspondence cloud for alignment");
  bp->add_option("--out", bp_out, "Output tensor path")->required();

  // split
  auto* sp = app.add_subcommand("split", "Solve the test-set selection program");
  std::string sp_problem, sp_out, sp_mode = "auto";
  int sp_iterations = 20;
  sp->add_option("--problem", sp_problem, "Problem JSON")->required();
  sp->add_option("--out", sp_out, "Solution JSON")->required();
  sp->add_option("--mode", sp_mode, "exact|heuristic|auto");
  sp->add_option("--iterations", sp_iterations, "Local search passes");

  // taxonomy
  auto* tx = app.add_subcommand("taxonomy", "Cluster classes and build trees");
  std::string tx_graph, tx_words, tx_overrides, tx_clusters, tx_trees,
      tx_tree, tx_outline;
  bool tx_combine = false;
  tx->add_option("--graph", tx_graph, "Hypernym edges TSV")->required();
  tx->add_option("--words", tx_words, "Class list, one per line")->required();
  tx->add_option("--overrides", tx_overrides, "Polysemy override JSON");
  tx->add_option("--clusters-out", tx_clusters, "Clusters JSON path");
  tx->add_option("--trees-out", tx_trees, "Per-cluster trees JSON path");
  tx->add_option("--tree-out", tx_tree, "Combined tree JSON path");
  tx->add_option("--outline-out", tx_outline, "Combined tree outline path");
  tx->add_flag("--combine", tx_combine, "Combine all cluster trees");

  // tune
  auto* tn = app.add_subcommand("tune", "Grid search over fusion parameters");
  std::string tn_dataset, tn_out;
  std::vector<double> tn_gammas, tn_taus, tn_betas;
  tn->add_option("--dataset", tn_dataset, "Dataset directory")->required();
  tn->add_option("--out", tn_out, "Best config JSON path")->required();
  tn->add_option("--gammas", tn_gammas, "Gamma grid values")->delimiter(',');
  tn->add_option("--taus", tn_taus, "Tau grid values")->delimiter(',');
  tn->add_option("--betas", tn_betas, "Beta grid values")->delimiter(',');

  // fixture
  auto* fx = app.add_subcommand("fixture", "Generate a synthetic dataset");
  std::string fx_out;
  stgt::FixtureSpec fx_spec;
  bool fx_no_depth = false, fx_no_clouds = false;
  fx->add_option("--out", fx_out, "Output directory")->required();
  fx->add_option("--videos", fx_spec.videos, "Video count");
  fx->add_option("--instances", fx_spec.instances, "Instance count");
  fx->add_option("--frames", fx_spec.frames, "Keyframes per instance");
  fx->add_option("--distractors", fx_spec.distractors,
                 "Distractor masks per instance");
  fx->add_flag("--adversarial", fx_spec.adversarial,
               "Queries orthogonal to the GT channels");
  fx->add_flag("--no-depth", fx_no_depth, "Skip depth values");
  fx->add_flag("--no-clouds", fx_no_clouds, "Skip point clouds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (ev->parsed()) {
      return cmd_evaluate(g, ev_gt, ev_pred, ev_out, ev_csv, ev_label, ev_agg);
    }
    if (gr->parsed()) {
      return cmd_ground(g, gr_dataset, gr_out, gr_report, gr_csv, gr_label);
    }
    if (mg->parsed()) {
      return cmd_match_gt(g, mg_candidates, mg_instance, mg_object, mg_out);
    }
    if (al->parsed()) return cmd_align(al_human, al_scene, al_out);
    if (bp->parsed()) {
      return cmd_bps(g, bp_mesh, bp_scene, bp_front, bp_corresp, bp_out);
    }
    if (sp->parsed()) return cmd_split(g, sp_problem, sp_out, sp_mode, sp_iterations);
    if (tx->parsed()) {
      return cmd_taxonomy(tx_graph, tx_words, tx_overrides, tx_clusters,
                          tx_trees, tx_tree, tx_outline, tx_combine);
    }
    if (tn->parsed()) {
      return cmd_tune(g, tn_dataset, tn_out, tn_gammas, tn_taus, tn_betas);
    }
    if (fx->parsed()) {
      fx_spec.with_depth = !fx_no_depth;
      fx_spec.with_clouds = !fx_no_clouds;
      return cmd_fixture(g, fx_out, fx_spec);
    }
  } catch (const stgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}
