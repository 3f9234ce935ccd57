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

#include "stgt/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stgt/tensor.hpp"

namespace stgt {

using nlohmann::json;

const std::vector<std::string>& interaction_classes() {
  static const std::vector<std::string> kClasses = {
      "jump/leap", "lie/sleep", "sit", "answer phone", "brush teeth",
      "carry/hold", "catch", "chop", "clink glass", "close", "cook", "cut",
      "dig", "dress/put on clothing", "drink", "drive", "eat", "enter",
      "exit", "extract", "fishing", "hit", "kick", "lift/pick up", "listen",
      "open", "paint", "play board game", "play musical instrument",
      "play with pets", "point to", "press", "pull", "push", "put down",
      "read", "ride", "row boat", "sail boat", "shoot", "shovel", "smoke",
      "stir", "take a photo", "text on/look at a cellphone", "throw",
      "touch", "turn", "watch", "work on a computer", "write"};
  return kClasses;
}

bool is_interaction_class(const std::string& verb) {
  const auto& classes = interaction_classes();
  return std::find(classes.begin(), classes.end(), verb) != classes.end();
}

bool CandidateSet::any_depth() const {
  return std::any_of(masks.begin(), masks.end(),
                     [](const Mask& m) { return m.has_depth(); });
}

namespace {

json box_to_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError(where, "box must be an [x1,y1,x2,y2] array");
  }
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
        j[3].get<double>()};
  if (!b.valid()) throw ValidationError(where, "box coordinates are invalid");
  return b;
}

json tracklet_frames_to_json(const Tracklet& t, bool with_scores) {
  json frames = json::array();
  for (const TrackletFrame& f : t.frames) {
    json jf;
    jf["ts"] = f.ts;
    jf["box"] = box_to_json(f.box);
    if (with_scores) jf["score"] = f.score;
    frames.push_back(jf);
  }
  return frames;
}

std::vector<TrackletFrame> frames_from_json(const json& j,
                                            const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where, "frames must be a non-empty array");
  }
  std::vector<TrackletFrame> frames;
  for (const json& jf : j) {
    TrackletFrame f;
    f.ts = jf.at("ts").get<std::int64_t>();
    f.box = box_from_json(jf.at("box"), where);
    f.score = jf.value("score", 0.0);
    frames.push_back(f);
  }
  return frames;
}

std::string fmt_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

std::string fmt_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::vector<GroundingInstance> load_annotations(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations: " + path.string());
  std::vector<GroundingInstance> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(path.string(), line_no,
                            std::string("bad json: ") + e.what());
    }
    try {
      GroundingInstance inst;
      inst.video_id = j.at("video_id").get<std::string>();
      inst.instance_id = j.at("instance_id").get<std::int64_t>();
      inst.verb = j.at("verb").get<std::string>();
      if (!is_interaction_class(inst.verb)) {
        throw ValidationError(path.string(), line_no,
                              "unknown interaction class '" + inst.verb + "'");
      }
      inst.human.video_id = inst.video_id;
      inst.human.instance_id = inst.instance_id;
      inst.human.verb = inst.verb;
      inst.human.frames =
          frames_from_json(j.at("human").at("frames"), path.string());
      try {
        inst.human.validate();
        for (const json& jo : j.at("objects")) {
          Tracklet obj;
          obj.video_id = inst.video_id;
          obj.instance_id = inst.instance_id;
          obj.verb = inst.verb;
          obj.frames = frames_from_json(jo.at("frames"), path.string());
          obj.validate();
          inst.objects.push_back(std::move(obj));
        }
      } catch (const ValidationError& e) {
        throw ValidationError(path.string(), line_no, e.what());
      }
      out.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw ValidationError(path.string(), line_no,
                            std::string("bad annotation: ") + e.what());
    }
  }
  return out;
}

void save_annotations(const std::filesystem::path& path,
                      const std::vector<GroundingInstance>& annotations) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write annotations: " + path.string());
  for (const GroundingInstance& inst : annotations) {
    json j;
    j["video_id"] = inst.video_id;
    j["instance_id"] = inst.instance_id;
    j["verb"] = inst.verb;
    j["human"] = {{"frames", tracklet_frames_to_json(inst.human, false)}};
    json objects = json::array();
    for (const Tracklet& obj : inst.objects) {
      objects.push_back({{"frames", tracklet_frames_to_json(obj, false)}});
    }
    j["objects"] = objects;
    out << j.dump() << "\n";
  }
}

std::vector<Tracklet> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions: " + path.string());
  std::vector<Tracklet> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(path.string(), line_no,
                            std::string("bad json: ") + e.what());
    }
    try {
      Tracklet t;
      t.video_id = j.at("video_id").get<std::string>();
      t.instance_id = j.at("human_id").get<std::int64_t>();
      t.verb = j.at("verb").get<std::string>();
      t.frames = frames_from_json(j.at("frames"), path.string());
      t.validate();
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw ValidationError(path.string(), line_no,
                            std::string("bad prediction: ") + e.what());
    }
  }
  return out;
}

void save_predictions(const std::filesystem::path& path,
                      const std::vector<Tracklet>& predictions) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write predictions: " + path.string());
  for (const Tracklet& t : predictions) {
    json j;
    j["video_id"] = t.video_id;
    j["human_id"] = t.instance_id;
    j["verb"] = t.verb;
    j["frames"] = tracklet_frames_to_json(t, true);
    out << j.dump() << "\n";
  }
}

namespace {

json mask_to_json(const Mask& m) {
  json j;
  j["counts"] = m.runs();
  if (m.has_depth()) j["depth"] = m.depth();
  return j;
}

Mask mask_from_json(const json& j, int width, int height,
                    const std::string& where) {
  try {
    auto runs = j.at("counts").get<std::vector<std::uint32_t>>();
    std::vector<float> depth;
    if (j.contains("depth")) depth = j["depth"].get<std::vector<float>>();
    return Mask(width, height, std::move(runs), std::move(depth));
  } catch (const json::exception& e) {
    throw ValidationError(where, std::string("bad mask: ") + e.what());
  } catch (const DimensionError& e) {
    throw ValidationError(where, e.what());
  }
}

}  // namespace

CandidateSet load_candidates(const std::filesystem::path& path, int mask_cap,
                             std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open candidate file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string(), std::string("bad json: ") + e.what());
  }
  CandidateSet set;
  try {
    set.video_id = j.at("video_id").get<std::string>();
    set.ts = j.at("ts").get<std::int64_t>();
    set.width = j.at("width").get<int>();
    set.height = j.at("height").get<int>();
    for (const json& jm : j.at("masks")) {
      set.masks.push_back(mask_from_json(jm, set.width, set.height,
                                         path.string()));
    }
    if (j.contains("accurate")) {
      for (const auto& [key, value] : j["accurate"].items()) {
        std::int64_t instance = 0;
        try {
          instance = std::stoll(key);
        } catch (const std::exception&) {
          throw ValidationError(path.string(),
                                "accurate-mask key must be an instance id, "
                                "got '" + key + "'");
        }
        for (const json& jm : value) {
          set.accurate[instance].push_back(
              mask_from_json(jm, set.width, set.height, path.string()));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string(),
                          std::string("bad candidate file: ") + e.what());
  }
  if (static_cast<int>(set.masks.size()) > mask_cap) {
    // Keep the largest masks; stable on ties so the file order still rules.
    std::vector<std::size_t> order(set.masks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return set.masks[a].area() > set.masks[b].area();
                     });
    order.resize(static_cast<std::size_t>(mask_cap));
    std::sort(order.begin(), order.end());
    std::vector<Mask> kept;
    kept.reserve(order.size());
    for (std::size_t idx : order) kept.push_back(std::move(set.masks[idx]));
    if (warnings) {
      warnings->push_back(path.string() + ": " +
                          std::to_string(set.masks.size()) +
                          " masks exceed the cap, keeping the " +
                          std::to_string(mask_cap) + " largest");
    }
    set.masks = std::move(kept);
  }
  return set;
}

void save_candidates(const std::filesystem::path& path,
                     const CandidateSet& set) {
  json j;
  j["video_id"] = set.video_id;
  j["ts"] = set.ts;
  j["width"] = set.width;
  j["height"] = set.height;
  json masks = json::array();
  for (const Mask& m : set.masks) masks.push_back(mask_to_json(m));
  j["masks"] = masks;
  if (!set.accurate.empty()) {
    json acc = json::object();
    for (const auto& [instance, list] : set.accurate) {
      json arr = json::array();
      for (const Mask& m : list) arr.push_back(mask_to_json(m));
      acc[std::to_string(instance)] = arr;
    }
    j["accurate"] = acc;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write candidate file: " + path.string());
  out << j.dump() << "\n";
}

CloudRecord load_cloud(const std::filesystem::path& tensor_path) {
  Tensor t = read_tensor(tensor_path);
  if (t.shape.size() != 2 || t.shape[1] != 3) {
    throw ValidationError(tensor_path.string(), "cloud tensor must be Nx3");
  }
  CloudRecord rec;
  rec.tensor_path = tensor_path;
  rec.cloud.role = cloud_role_from_name(t.role);
  rec.cloud.points.reserve(static_cast<std::size_t>(t.shape[0]));
  for (std::int64_t i = 0; i < t.shape[0]; ++i) {
    rec.cloud.points.push_back(Vec3{t.data[3 * i + 0], t.data[3 * i + 1],
                                    t.data[3 * i + 2]});
  }

  std::filesystem::path sidecar = tensor_path;
  sidecar += ".json";
  std::ifstream in(sidecar);
  if (!in) throw IoError("missing cloud sidecar: " + sidecar.string());
  json j;
  try {
    in >> j;
    rec.video_id = j.at("video_id").get<std::string>();
    rec.instance_id = j.at("instance_id").get<std::int64_t>();
    rec.ts = j.at("ts").get<std::int64_t>();
    if (j.at("role").get<std::string>() != t.role) {
      throw ValidationError(sidecar.string(),
                            "sidecar role disagrees with tensor header");
    }
    const json& p = j.at("pelvis");
    rec.pelvis = Vec3{p[0].get<double>(), p[1].get<double>(),
                      p[2].get<double>()};
  } catch (const json::exception& e) {
    throw ValidationError(sidecar.string(),
                          std::string("bad sidecar: ") + e.what());
  }
  return rec;
}

void save_cloud(const std::filesystem::path& tensor_path,
                const CloudRecord& record) {
  Tensor t;
  t.role = cloud_role_name(record.cloud.role);
  t.shape = {static_cast<std::int64_t>(record.cloud.size()), 3};
  t.data.reserve(record.cloud.size() * 3);
  for (const Vec3& p : record.cloud.points) {
    t.data.push_back(static_cast<float>(p.x));
    t.data.push_back(static_cast<float>(p.y));
    t.data.push_back(static_cast<float>(p.z));
  }
  write_tensor(tensor_path, t);

  json j;
  j["video_id"] = record.video_id;
  j["instance_id"] = record.instance_id;
  j["ts"] = record.ts;
  j["role"] = t.role;
  j["pelvis"] = {record.pelvis.x, record.pelvis.y, record.pelvis.z};
  std::filesystem::path sidecar = tensor_path;
  sidecar += ".json";
  std::ofstream out(sidecar, std::ios::trunc);
  if (!out) throw IoError("cannot write cloud sidecar: " + sidecar.string());
  out << j.dump() << "\n";
}

namespace {

json breakdown_to_json(const std::map<std::string, BinBreakdown>& bins) {
  json j = json::object();
  for (const auto& [name, b] : bins) {
    j[name] = {{"count", b.count}, {"map50", b.map50}, {"miou_w", b.miou_w}};
  }
  return j;
}

}  // namespace

void save_report(const std::filesystem::path& path, const EvalReport& report,
                 const std::string& label) {
  json j;
  j["label"] = label;
  if (!report.mode.empty()) j["mode"] = report.mode;
  j["total_instances"] = report.total_instances;
  j["instances_without_predictions"] = report.instances_without_predictions;
  json map = json::object();
  for (const auto& [t, v] : report.map) map[fmt_threshold(t)] = v;
  j["map"] = map;
  j["miou_w"] = report.miou_w;
  j["size_bins"] = breakdown_to_json(report.size_bins);
  j["distance_bins"] = breakdown_to_json(report.distance_bins);
  j["unbinned"] = report.unbinned;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << j.dump(2) << "\n";
}

void save_report_csv(const std::filesystem::path& path,
                     const EvalReport& report, const std::string& label) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report csv: " + path.string());
  out << "method";
  for (const auto& [t, v] : report.map) out << ",mAP@" << fmt_threshold(t);
  out << ",mIoU_w\n";
  out << label;
  for (const auto& [t, v] : report.map) out << "," << fmt_metric(v);
  out << "," << fmt_metric(report.miou_w) << "\n";
}

SplitProblem load_split_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split problem: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string(), std::string("bad json: ") + e.what());
  }
  SplitProblem p;
  try {
    for (const json& jv : j.at("videos")) {
      p.interactions.push_back(jv.at("interactions").get<std::vector<double>>());
      p.objects.push_back(jv.at("objects").get<std::vector<double>>());
      p.heatmaps.push_back(jv.at("heatmap").get<std::vector<double>>());
    }
    p.target_size = j.at("target_size").get<int>();
    if (j.contains("class_floors")) {
      p.class_floors = j["class_floors"].get<std::vector<double>>();
    }
    p.heatmap_floor = j.value("heatmap_floor", 0.0);
  } catch (const json::exception& e) {
    throw ValidationError(path.string(),
                          std::string("bad split problem: ") + e.what());
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw ValidationError(path.string(), e.what());
  }
  return p;
}

void save_split_problem(const std::filesystem::path& path,
                        const SplitProblem& p) {
  json videos = json::array();
  for (int i = 0; i < p.video_count(); ++i) {
    videos.push_back({{"interactions", p.interactions[i]},
                      {"objects", p.objects[i]},
                      {"heatmap", p.heatmaps[i]}});
  }
  json j;
  j["videos"] = videos;
  j["target_size"] = p.target_size;
  j["class_floors"] = p.class_floors;
  j["heatmap_floor"] = p.heatmap_floor;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write split problem: " + path.string());
  out << j.dump(2) << "\n";
}

void save_split_solution(const std::filesystem::path& path,
                         const SplitProblem& p, const SplitSolution& s) {
  json j;
  j["selected"] = s.selected;
  j["objective"] = s.objective;
  j["feasible"] = s.feasible;
  j["flags"] = {{"size_ok", s.flags.size_ok},
                {"heatmap_ok", s.flags.heatmap_ok},
                {"class_ok", s.flags.class_ok}};
  // Per-constraint slack: achieved total minus the floor.
  std::vector<double> class_totals(p.class_floors.size(), 0.0);
  double top_half = 0.0;
  for (int i : s.selected) {
    for (std::size_t k = 0; k < p.class_floors.size(); ++k) {
      class_totals[k] += p.interactions[i][k];
    }
    std::size_t half = p.heatmaps[i].size() / 2;
    for (std::size_t k = 0; k < half; ++k) top_half += p.heatmaps[i][k];
  }
  std::vector<double> class_slack;
  for (std::size_t k = 0; k < p.class_floors.size(); ++k) {
    class_slack.push_back(class_totals[k] - p.class_floors[k]);
  }
  j["slack"] = {{"classes", class_slack},
                {"heatmap", top_half - p.heatmap_floor}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write split solution: " + path.string());
  out << j.dump(2) << "\n";
}

TaxonomyGraph load_taxonomy_graph(const std::filesystem::path& tsv_path) {
  std::ifstream in(tsv_path);
  if (!in) throw IoError("cannot open hypernym graph: " + tsv_path.string());
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(tsv_path.string(), line_no,
                            "expected child<TAB>parent");
    }
    std::string child = line.substr(0, tab);
    std::string parent = line.substr(tab + 1);
    if (!parent.empty() && parent.back() == '\r') parent.pop_back();
    if (child.empty() || parent.empty()) {
      throw ValidationError(tsv_path.string(), line_no, "empty node name");
    }
    edges.emplace_back(child, parent);
  }
  try {
    return TaxonomyGraph::from_edges(edges);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(tsv_path.string(), e.what());
  }
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') words.push_back(line);
  }
  return words;
}

TaxonomyOverrides load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open overrides: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string(), std::string("bad json: ") + e.what());
  }
  TaxonomyOverrides overrides;
  for (const auto& [word, node] : j.items()) {
    overrides[word] = node.get<std::string>();
  }
  return overrides;
}

void save_clusters(const std::filesystem::path& path,
                   const std::vector<Cluster>& clusters) {
  json arr = json::array();
  for (const Cluster& c : clusters) arr.push_back({{"words", c.words}});
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write clusters: " + path.string());
  out << arr.dump(2) << "\n";
}

namespace {

json tree_node_to_json(const ClassTree& tree, int node) {
  const ClassTreeNode& n = tree.nodes()[node];
  json j;
  j["name"] = n.name;
  if (n.synthetic) j["synthetic"] = true;
  json children = json::array();
  for (int c : n.children) children.push_back(tree_node_to_json(tree, c));
  j["children"] = children;
  return j;
}

void outline_node(const ClassTree& tree, int node, int indent,
                  std::string& out) {
  const ClassTreeNode& n = tree.nodes()[node];
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += n.name;
  if (n.synthetic) out += " *";
  out += "\n";
  for (int c : n.children) outline_node(tree, c, indent + 1, out);
}

}  // namespace

void save_tree(const std::filesystem::path& path, const ClassTree& tree) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write tree: " + path.string());
  out << tree_node_to_json(tree, tree.root()).dump(2) << "\n";
}

void save_trees(const std::filesystem::path& path,
                const std::vector<ClassTree>& trees) {
  json arr = json::array();
  for (const ClassTree& t : trees) arr.push_back(tree_node_to_json(t, t.root()));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write trees: " + path.string());
  out << arr.dump(2) << "\n";
}

std::string tree_outline(const ClassTree& tree) {
  std::string out;
  outline_node(tree, tree.root(), 0, out);
  return out;
}

Dataset load_dataset(const std::filesystem::path& root, const RunConfig& cfg,
                     std::vector<std::string>* warnings) {
  Dataset ds;
  ds.root = root;
  std::filesystem::path manifest_path = root / "manifest.json";
  std::ifstream min(manifest_path);
  if (!min) throw IoError("missing manifest: " + manifest_path.string());
  json manifest;
  try {
    min >> manifest;
  } catch (const json::exception& e) {
    throw ValidationError(manifest_path.string(),
                          std::string("bad json: ") + e.what());
  }
  if (manifest.value("format", "") != "stgt-dataset") {
    throw ValidationError(manifest_path.string(), "not a dataset manifest");
  }
  ds.image_width = manifest.value("image_width", 0);
  ds.image_height = manifest.value("image_height", 0);
  if (ds.image_width <= 0 || ds.image_height <= 0) {
    throw ValidationError(manifest_path.string(), "bad image dimensions");
  }
  ds.has_features = manifest.value("has_features", false);
  ds.has_clouds = manifest.value("has_clouds", false);

  std::filesystem::path ann_path = root / "annotations.jsonl";
  if (std::filesystem::exists(ann_path)) {
    ds.annotations = load_annotations(ann_path);
  }

  int cap = cfg.effective_mask_cap(warnings);
  for (const GroundingInstance& inst : ds.annotations) {
    for (const TrackletFrame& f : inst.human.frames) {
      auto key = std::make_pair(inst.video_id, f.ts);
      if (!ds.candidates.count(key)) {
        std::filesystem::path cpath = root / "candidates" / inst.video_id /
                                      (std::to_string(f.ts) + ".json");
        if (!std::filesystem::exists(cpath)) {
          throw ValidationError(cpath.string(),
                                "candidate file referenced by " +
                                    inst.video_id + "/" +
                                    std::to_string(inst.instance_id) +
                                    " ts=" + std::to_string(f.ts) +
                                    " does not exist");
        }
        CandidateSet set = load_candidates(cpath, cap, warnings);
        if (set.video_id != inst.video_id || set.ts != f.ts) {
          throw ValidationError(cpath.string(),
                                "candidate file does not match its key");
        }
        if (set.width != ds.image_width || set.height != ds.image_height) {
          throw ValidationError(cpath.string(),
                                "candidate mask grid does not match the "
                                "manifest image dimensions");
        }
        if (set.any_depth()) ds.has_depth = true;
        ds.candidates.emplace(key, std::move(set));
      }
      if (ds.has_features) {
        auto fkey = std::make_pair(inst.video_id, f.ts);
        if (!ds.context.count(fkey)) {
          std::filesystem::path fpath = root / "features" / inst.video_id /
                                        (std::to_string(f.ts) + ".stgt");
          if (!std::filesystem::exists(fpath)) {
            throw ValidationError(fpath.string(),
                                  "context feature file does not exist");
          }
          Tensor t = read_tensor(fpath);
          if (t.shape.size() != 3 || t.role != "context") {
            throw ValidationError(fpath.string(),
                                  "context tensor must be HxWxD");
          }
          FeatureMap map;
          map.height = static_cast<int>(t.shape[0]);
          map.width = static_cast<int>(t.shape[1]);
          map.dim = static_cast<int>(t.shape[2]);
          map.data.assign(t.data.begin(), t.data.end());
          map.validate();
          ds.context.emplace(fkey, std::move(map));
        }
        auto qkey = std::make_tuple(inst.video_id, inst.instance_id, f.ts);
        if (!ds.queries.count(qkey)) {
          std::filesystem::path qpath =
              root / "queries" / inst.video_id /
              std::to_string(inst.instance_id) /
              (std::to_string(f.ts) + ".stgt");
          if (!std::filesystem::exists(qpath)) {
            throw ValidationError(qpath.string(),
                                  "query feature file does not exist");
          }
          Tensor t = read_tensor(qpath);
          if (t.shape.size() != 2 || t.role != "query") {
            throw ValidationError(qpath.string(), "query tensor must be NxD");
          }
          std::vector<FeatureVec> qs;
          for (std::int64_t q = 0; q < t.shape[0]; ++q) {
            FeatureVec v;
            v.kind = FeatureKind::DecoderOutput;
            v.values.assign(t.data.begin() + q * t.shape[1],
                            t.data.begin() + (q + 1) * t.shape[1]);
            qs.push_back(std::move(v));
          }
          ds.queries.emplace(qkey, std::move(qs));
        }
      }
    }
  }

  if (ds.has_clouds) {
    std::filesystem::path cdir = root / "clouds";
    if (std::filesystem::exists(cdir)) {
      std::set<std::filesystem::path> paths;  // sorted for determinism
      for (const auto& entry :
           std::filesystem::recursive_directory_iterator(cdir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".stgt") {
          paths.insert(entry.path());
        }
      }
      for (const auto& p : paths) {
        CloudRecord rec = load_cloud(p);
        // Cloud records must reference annotated keyframes. A record whose
        // instance is not annotated at all is dangling auxiliary data:
        // skipped with a warning. A record for an annotated instance whose
        // timestamp is not a keyframe is a hard mismatch.
        bool instance_known = false;
        bool ts_known = false;
        for (const GroundingInstance& inst : ds.annotations) {
          if (inst.video_id != rec.video_id ||
              inst.instance_id != rec.instance_id) {
            continue;
          }
          instance_known = true;
          for (const TrackletFrame& f : inst.human.frames) {
            if (f.ts == rec.ts) {
              ts_known = true;
              break;
            }
          }
        }
        if (!instance_known) {
          if (warnings) {
            warnings->push_back(p.string() +
                                ": cloud record has no annotation, skipped");
          }
          continue;
        }
        if (!ts_known) {
          throw ValidationError(p.string(),
                                "cloud record references a keyframe missing "
                                "from its annotation tracklet");
        }
        ds.clouds.push_back(std::move(rec));
      }
    }
  }
  return ds;
}

}  // namespace stgt
