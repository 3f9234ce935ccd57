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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stgt/dataset.hpp"
#include "stgt/fixture.hpp"
#include "stgt/pipeline.hpp"

namespace py = pybind11;
using namespace stgt;

namespace {

PointCloud cloud_from_list(const std::vector<std::array<double, 3>>& pts,
                           CloudRole role) {
  PointCloud c;
  c.role = role;
  c.points.reserve(pts.size());
  for (const auto& p : pts) c.points.push_back(Vec3{p[0], p[1], p[2]});
  return c;
}

std::vector<std::array<double, 3>> cloud_to_list(const PointCloud& c) {
  std::vector<std::array<double, 3>> out;
  out.reserve(c.size());
  for (const Vec3& p : c.points) out.push_back({p.x, p.y, p.z});
  return out;
}

py::dict report_to_dict(const EvalReport& r) {
  py::dict d;
  py::dict map;
  for (const auto& [t, v] : r.map) map[py::float_(t)] = v;
  d["map"] = map;
  d["miou_w"] = r.miou_w;
  d["total_instances"] = r.total_instances;
  d["instances_without_predictions"] = r.instances_without_predictions;
  d["unbinned"] = r.unbinned;
  d["mode"] = r.mode;
  auto bins_to_dict = [](const std::map<std::string, BinBreakdown>& bins) {
    py::dict out;
    for (const auto& [name, b] : bins) {
      py::dict e;
      e["count"] = b.count;
      e["map50"] = b.map50;
      e["miou_w"] = b.miou_w;
      out[py::str(name)] = e;
    }
    return out;
  };
  d["size_bins"] = bins_to_dict(r.size_bins);
  d["distance_bins"] = bins_to_dict(r.distance_bins);
  return d;
}

py::dict tree_to_dict(const ClassTree& tree, int node) {
  const ClassTreeNode& n = tree.nodes()[node];
  py::dict d;
  d["name"] = n.name;
  d["synthetic"] = n.synthetic;
  py::list children;
  for (int c : n.children) children.append(tree_to_dict(tree, c));
  d["children"] = children;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grounding, 4D layout encoding and evaluation primitives";

  py::register_exception<Error>(m, "StgtError", PyExc_RuntimeError);

  // ---- geometry ----
  py::class_<Box>(m, "Box")
      .def(py::init<double, double, double, double>(), py::arg("x1"),
           py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &Box::x1)
      .def_readwrite("y1", &Box::y1)
      .def_readwrite("x2", &Box::x2)
      .def_readwrite("y2", &Box::y2)
      .def("area", &Box::area)
      .def("__eq__", [](const Box& a, const Box& b) { return a == b; })
      .def("__repr__", [](const Box& b) {
        return "Box(" + std::to_string(b.x1) + ", " + std::to_string(b.y1) +
               ", " + std::to_string(b.x2) + ", " + std::to_string(b.y2) + ")";
      });

  py::class_<Mask>(m, "Mask")
      .def(py::init<int, int, std::vector<std::uint32_t>, std::vector<float>>(),
           py::arg("width"), py::arg("height"), py::arg("counts"),
           py::arg("depth") = std::vector<float>{})
      .def_static("from_grid", &Mask::from_grid, py::arg("width"),
                  py::arg("height"), py::arg("grid"),
                  py::arg("depth") = std::vector<float>{})
      .def_static(
          "from_rect",
          [](int w, int h, int x1, int y1, int x2, int y2,
             std::optional<float> depth) {
            return depth ? Mask::from_rect(w, h, x1, y1, x2, y2, *depth)
                         : Mask::from_rect(w, h, x1, y1, x2, y2);
          },
          py::arg("width"), py::arg("height"), py::arg("x1"), py::arg("y1"),
          py::arg("x2"), py::arg("y2"), py::arg("depth") = std::nullopt)
      .def_property_readonly("width", &Mask::width)
      .def_property_readonly("height", &Mask::height)
      .def_property_readonly("counts", &Mask::runs)
      .def("area", &Mask::area)
      .def("has_depth", &Mask::has_depth)
      .def("to_grid", &Mask::to_grid);

  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("giou", &giou, py::arg("a"), py::arg("b"));
  m.def("mask_to_box", &mask_to_box, py::arg("mask"));
  m.def("mask_intersection_area", &mask_intersection_area, py::arg("a"),
        py::arg("b"));

  // ---- 4D layout ----
  py::class_<AlignmentTransform>(m, "AlignmentTransform")
      .def_readonly("scale", &AlignmentTransform::scale)
      .def_property_readonly("displacement", [](const AlignmentTransform& t) {
        return std::array<double, 3>{t.displacement.x, t.displacement.y,
                                     t.displacement.z};
      });

  m.def(
      "align_scene_to_human",
      [](const std::vector<std::array<double, 3>>& human_front,
         const std::vector<std::array<double, 3>>& scene_corresp) {
        return align_scene_to_human(
            cloud_from_list(human_front, CloudRole::HumanFront),
            cloud_from_list(scene_corresp, CloudRole::SceneCorrespondence));
      },
      py::arg("human_front"), py::arg("scene_corresp"));

  m.def(
      "apply_alignment",
      [](const std::vector<std::array<double, 3>>& cloud,
         const AlignmentTransform& t) {
        return cloud_to_list(
            apply_alignment(cloud_from_list(cloud, CloudRole::Scene), t));
      },
      py::arg("cloud"), py::arg("transform"));

  m.def(
      "generate_base_points",
      [](int feature_dim, double radius_factor, std::uint64_t seed,
         const std::array<double, 3>& pelvis, double body_height) {
        BpsConfig cfg;
        cfg.feature_dim = feature_dim;
        cfg.radius_factor = radius_factor;
        cfg.seed = seed;
        return cloud_to_list(generate_base_points(
            cfg, Vec3{pelvis[0], pelvis[1], pelvis[2]}, body_height));
      },
      py::arg("feature_dim"), py::arg("radius_factor"), py::arg("seed"),
      py::arg("pelvis"), py::arg("body_height"));

  m.def(
      "bps_encode",
      [](const std::vector<std::array<double, 3>>& base,
         const std::vector<std::array<double, 3>>& human,
         const std::vector<std::array<double, 3>>& scene) {
        return bps_encode(cloud_from_list(base, CloudRole::BasePoints),
                          cloud_from_list(human, CloudRole::HumanMesh),
                          cloud_from_list(scene, CloudRole::Scene))
            .values;
      },
      py::arg("base"), py::arg("human"), py::arg("scene"));

  m.def(
      "body_height",
      [](const std::vector<std::array<double, 3>>& mesh) {
        return body_height(cloud_from_list(mesh, CloudRole::HumanMesh));
      },
      py::arg("human_mesh"));

  // ---- grounding ----
  py::class_<FeatureMap>(m, "FeatureMap")
      .def(py::init([](int height, int width, int dim,
                       std::vector<double> data) {
             FeatureMap f;
             f.height = height;
             f.width = width;
             f.dim = dim;
             f.data = std::move(data);
             f.validate();
             return f;
           }),
           py::arg("height"), py::arg("width"), py::arg("dim"),
           py::arg("data"))
      .def_readonly("height", &FeatureMap::height)
      .def_readonly("width", &FeatureMap::width)
      .def_readonly("dim", &FeatureMap::dim);

  py::class_<FusionConfig>(m, "FusionConfig")
      .def(py::init([](double gamma, double tau, double beta) {
             FusionConfig c;
             c.gamma = gamma;
             c.tau = tau;
             c.beta = beta;
             c.validate();
             return c;
           }),
           py::arg("gamma") = 0.5, py::arg("tau") = 0.5, py::arg("beta") = 0.5)
      .def_readwrite("gamma", &FusionConfig::gamma)
      .def_readwrite("tau", &FusionConfig::tau)
      .def_readwrite("beta", &FusionConfig::beta);

  py::class_<ScoredMask>(m, "ScoredMask")
      .def_readonly("index", &ScoredMask::index)
      .def_readonly("s_m", &ScoredMask::s_m)
      .def_readonly("s_d", &ScoredMask::s_d)
      .def_readonly("s_f", &ScoredMask::s_f);

  m.def(
      "pool_object_feature",
      [](const FeatureMap& fc, const Mask& mask, const std::string& mode) {
        return pool_object_feature(fc, mask, pool_mode_from_name(mode)).values;
      },
      py::arg("context"), py::arg("mask"), py::arg("mode") = "foreground-mean");

  m.def(
      "pool_human_query",
      [](const std::vector<FeatureMap>& slices, const Box& hbox) {
        return pool_human_query(slices, hbox).values;
      },
      py::arg("slices"), py::arg("hbox"));

  m.def(
      "match_gt_masks",
      [](const std::vector<Mask>& proposals, const Mask& accurate) {
        return match_gt_masks(proposals, accurate);
      },
      py::arg("proposals"), py::arg("accurate"));

  m.def(
      "score_masks",
      [](const std::vector<double>& query,
         const std::vector<std::vector<double>>& mask_feats,
         const std::vector<Box>& mask_boxes, const Box& hbox,
         const FusionConfig& cfg) {
        FeatureVec q{query, FeatureKind::DecoderOutput};
        std::vector<FeatureVec> feats;
        for (const auto& f : mask_feats) {
          feats.push_back(FeatureVec{f, FeatureKind::Object});
        }
        return score_masks(q, feats, mask_boxes, hbox, cfg);
      },
      py::arg("query"), py::arg("mask_features"), py::arg("mask_boxes"),
      py::arg("hbox"), py::arg("config"));

  m.def("select_masks", &select_masks, py::arg("scored"), py::arg("config"));
  m.def("depth_mode", &depth_mode, py::arg("mask"),
        py::arg("bin_width") = 0.05);

  m.def(
      "generate_boxes",
      [](const std::vector<Mask>& masks, const std::vector<ScoredMask>& scored,
         const std::vector<std::size_t>& selected, const FusionConfig& cfg,
         bool use_depth) {
        auto preds = generate_boxes(masks, scored, selected, cfg, use_depth);
        py::list out;
        for (const BoxPrediction& p : preds) {
          out.append(py::make_tuple(p.box, p.score));
        }
        return out;
      },
      py::arg("masks"), py::arg("scored"), py::arg("selected"),
      py::arg("config"), py::arg("use_depth"));

  m.def("weighted_bce", &weighted_bce, py::arg("predictions"),
        py::arg("labels"), py::arg("pos_weight") = 10.0);

  m.def(
      "grid_search",
      [](const std::function<double(double, double, double)>& eval_fn,
         const std::vector<double>& gammas, const std::vector<double>& taus,
         const std::vector<double>& betas, int threads) {
        GridSpec grid{gammas, taus, betas};
        auto wrapped = [&](const FusionConfig& c) {
          return eval_fn(c.gamma, c.tau, c.beta);
        };
        // Python callbacks hold the GIL; force serial evaluation.
        (void)threads;
        GridSearchResult r = grid_search(wrapped, grid, 1);
        return py::make_tuple(r.best, r.metric);
      },
      py::arg("eval_fn"), py::arg("gammas"), py::arg("taus"), py::arg("betas"),
      py::arg("threads") = 1);

  // ---- metrics ----
  py::class_<TrackletFrame>(m, "TrackletFrame")
      .def(py::init([](std::int64_t ts, const Box& box, double score) {
             return TrackletFrame{ts, box, score};
           }),
           py::arg("ts"), py::arg("box"), py::arg("score") = 0.0)
      .def_readwrite("ts", &TrackletFrame::ts)
      .def_readwrite("box", &TrackletFrame::box)
      .def_readwrite("score", &TrackletFrame::score);

  py::class_<Tracklet>(m, "Tracklet")
      .def(py::init([](std::string video_id, std::int64_t instance_id,
                       std::string verb, std::vector<TrackletFrame> frames) {
             Tracklet t;
             t.video_id = std::move(video_id);
             t.instance_id = instance_id;
             t.verb = std::move(verb);
             t.frames = std::move(frames);
             return t;
           }),
           py::arg("video_id"), py::arg("instance_id"), py::arg("verb"),
           py::arg("frames"))
      .def_readwrite("video_id", &Tracklet::video_id)
      .def_readwrite("instance_id", &Tracklet::instance_id)
      .def_readwrite("verb", &Tracklet::verb)
      .def_readwrite("frames", &Tracklet::frames)
      .def("score", &Tracklet::score);

  py::class_<GroundingInstance>(m, "GroundingInstance")
      .def(py::init([](std::string video_id, std::int64_t instance_id,
                       std::string verb, Tracklet human,
                       std::vector<Tracklet> objects) {
             GroundingInstance g;
             g.video_id = std::move(video_id);
             g.instance_id = instance_id;
             g.verb = std::move(verb);
             g.human = std::move(human);
             g.objects = std::move(objects);
             return g;
           }),
           py::arg("video_id"), py::arg("instance_id"), py::arg("verb"),
           py::arg("human"), py::arg("objects"))
      .def_readwrite("video_id", &GroundingInstance::video_id)
      .def_readwrite("instance_id", &GroundingInstance::instance_id)
      .def_readwrite("verb", &GroundingInstance::verb)
      .def_readwrite("human", &GroundingInstance::human)
      .def_readwrite("objects", &GroundingInstance::objects);

  m.def(
      "tracklet_iou",
      [](const Tracklet& gt, const Tracklet& pred, const std::string& agg) {
        return tracklet_iou(gt, pred, aggregation_from_name(agg));
      },
      py::arg("gt"), py::arg("pred"), py::arg("aggregation") = "mean");
  m.def(
      "instance_ap",
      [](const Tracklet& gt, const std::vector<Tracklet>& preds, double thresh,
         const std::string& agg) {
        return instance_ap(gt, preds, thresh, aggregation_from_name(agg));
      },
      py::arg("gt"), py::arg("preds"), py::arg("iou_thresh"),
      py::arg("aggregation") = "mean");
  m.def(
      "weighted_miou",
      [](const Tracklet& gt, const std::vector<Tracklet>& preds,
         const std::string& agg) {
        return weighted_miou(gt, preds, aggregation_from_name(agg));
      },
      py::arg("gt"), py::arg("preds"), py::arg("aggregation") = "mean");
  m.def(
      "evaluate",
      [](const std::vector<GroundingInstance>& gt,
         const std::vector<Tracklet>& preds,
         const std::vector<double>& thresholds, const std::string& agg,
         int threads) {
        EvalOptions opts;
        if (!thresholds.empty()) opts.iou_thresholds = thresholds;
        opts.aggregation = aggregation_from_name(agg);
        opts.threads = threads;
        return report_to_dict(evaluate(gt, preds, opts));
      },
      py::arg("gt"), py::arg("preds"),
      py::arg("thresholds") = std::vector<double>{},
      py::arg("aggregation") = "mean", py::arg("threads") = 1);

  // ---- splitter ----
  py::class_<SplitProblem>(m, "SplitProblem")
      .def(py::init([](std::vector<std::vector<double>> interactions,
                       std::vector<std::vector<double>> objects,
                       std::vector<std::vector<double>> heatmaps,
                       int target_size, std::vector<double> class_floors,
                       double heatmap_floor) {
             SplitProblem p;
             p.interactions = std::move(interactions);
             p.objects = std::move(objects);
             p.heatmaps = std::move(heatmaps);
             p.target_size = target_size;
             p.class_floors = std::move(class_floors);
             p.heatmap_floor = heatmap_floor;
             p.validate();
             return p;
           }),
           py::arg("interactions"), py::arg("objects"), py::arg("heatmaps"),
           py::arg("target_size"),
           py::arg("class_floors") = std::vector<double>{},
           py::arg("heatmap_floor") = 0.0);

  py::class_<SplitSolution>(m, "SplitSolution")
      .def_readonly("selected", &SplitSolution::selected)
      .def_readonly("objective", &SplitSolution::objective)
      .def_readonly("feasible", &SplitSolution::feasible);

  m.def("split_objective", &split_objective, py::arg("problem"),
        py::arg("selected"));
  m.def(
      "check_feasible",
      [](const SplitProblem& p, const std::vector<int>& sel) {
        return check_feasible(p, sel).feasible();
      },
      py::arg("problem"), py::arg("selected"));
  m.def("solve_exact", &solve_exact, py::arg("problem"), py::arg("threads") = 1);
  m.def("solve_heuristic", &solve_heuristic, py::arg("problem"),
        py::arg("seed") = 0, py::arg("iterations") = 20);

  // ---- taxonomy ----
  py::class_<TaxonomyGraph>(m, "TaxonomyGraph")
      .def_static("from_edges", &TaxonomyGraph::from_edges, py::arg("edges"))
      .def("contains", &TaxonomyGraph::contains)
      .def("depth", &TaxonomyGraph::depth)
      .def("roots", &TaxonomyGraph::roots)
      .def("undirected_distance", &TaxonomyGraph::undirected_distance)
      .def("is_ancestor_or_self", &TaxonomyGraph::is_ancestor_or_self);

  py::class_<ClassTree>(m, "ClassTree")
      .def("words", &ClassTree::words)
      .def("to_dict",
           [](const ClassTree& t) { return tree_to_dict(t, t.root()); });

  m.def(
      "cluster_classes",
      [](const std::vector<std::string>& words, const TaxonomyGraph& g,
         const TaxonomyOverrides& overrides) {
        auto clusters = cluster_classes(words, g, overrides);
        std::vector<std::vector<std::string>> out;
        for (const Cluster& c : clusters) out.push_back(c.words);
        return out;
      },
      py::arg("words"), py::arg("graph"),
      py::arg("overrides") = TaxonomyOverrides{});
  m.def(
      "construct_tree",
      [](const std::vector<std::string>& words, const TaxonomyGraph& g,
         const TaxonomyOverrides& overrides) {
        return construct_tree(Cluster{words}, g, overrides);
      },
      py::arg("words"), py::arg("graph"),
      py::arg("overrides") = TaxonomyOverrides{});
  m.def("combine_trees", &combine_trees, py::arg("tx"), py::arg("ty"),
        py::arg("graph"));

  // ---- dataset-level pipeline ----
  m.def(
      "generate_fixture",
      [](const std::filesystem::path& root, std::uint64_t seed, int videos,
         int instances, int frames, bool adversarial, bool with_depth,
         bool with_clouds) {
        FixtureSpec spec;
        spec.seed = seed;
        spec.videos = videos;
        spec.instances = instances;
        spec.frames = frames;
        spec.adversarial = adversarial;
        spec.with_depth = with_depth;
        spec.with_clouds = with_clouds;
        generate_fixture(root, spec, RunConfig{});
      },
      py::arg("root"), py::arg("seed") = 7, py::arg("videos") = 2,
      py::arg("instances") = 4, py::arg("frames") = 3,
      py::arg("adversarial") = false, py::arg("with_depth") = true,
      py::arg("with_clouds") = true);

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& dataset_dir,
         const std::optional<std::filesystem::path>& config_path,
         int threads) {
        RunConfig cfg = config_path ? load_config(*config_path) : RunConfig{};
        Dataset ds = load_dataset(dataset_dir, cfg);
        PipelineResult r = run_pipeline(ds, cfg, threads);
        py::dict out = report_to_dict(r.report);
        out["failed_instances"] = r.failed_instances;
        out["prediction_count"] = r.predictions.size();
        return out;
      },
      py::arg("dataset_dir"), py::arg("config") = std::nullopt,
      py::arg("threads") = 1);

  m.def("interaction_classes", &interaction_classes);
}
