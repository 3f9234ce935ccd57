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

#include "stgt/taxonomy.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace stgt {

namespace {

std::string resolve(const std::string& word, const TaxonomyOverrides& overrides) {
  auto it = overrides.find(word);
  return it == overrides.end() ? word : it->second;
}

}  // namespace

TaxonomyGraph TaxonomyGraph::from_edges(
    const std::vector<std::pair<std::string, std::string>>& child_parent) {
  TaxonomyGraph g;
  auto intern = [&](const std::string& name) {
    auto it = g.index_.find(name);
    if (it != g.index_.end()) return it->second;
    int id = static_cast<int>(g.names_.size());
    g.names_.push_back(name);
    g.index_[name] = id;
    g.parents_.emplace_back();
    g.children_.emplace_back();
    return id;
  };
  for (const auto& [child, parent] : child_parent) {
    int c = intern(child);
    int p = intern(parent);
    if (c == p) {
      throw ValidationError(child, "self-loop in hypernym graph");
    }
    g.parents_[c].push_back(p);
    g.children_[p].push_back(c);
  }

  // Depth by BFS down from the roots; also detects cycles (a node whose
  // parents never all resolve is on or below a cycle).
  int n = static_cast<int>(g.names_.size());
  g.depth_.assign(n, -1);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    if (g.parents_[i].empty()) {
      g.depth_[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    int node = queue.front();
    queue.pop_front();
    for (int child : g.children_[node]) {
      int d = g.depth_[node] + 1;
      if (g.depth_[child] == -1 || d < g.depth_[child]) {
        g.depth_[child] = d;
        queue.push_back(child);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (g.depth_[i] == -1) {
      throw ValidationError(g.names_[i],
                            "hypernym graph node cannot reach a root "
                            "(cycle or dangling edge)");
    }
  }
  return g;
}

int TaxonomyGraph::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw ConfigurationError("unknown taxonomy node: " + name);
  }
  return it->second;
}

bool TaxonomyGraph::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

int TaxonomyGraph::depth(const std::string& name) const {
  return depth_[index_of(name)];
}

std::vector<std::string> TaxonomyGraph::roots() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (parents_[i].empty()) out.push_back(names_[i]);
  }
  return out;
}

std::vector<std::string> TaxonomyGraph::parents(const std::string& name) const {
  std::vector<std::string> out;
  for (int p : parents_[index_of(name)]) out.push_back(names_[p]);
  return out;
}

int TaxonomyGraph::undirected_distance(const std::string& a,
                                       const std::string& b) const {
  int start = index_of(a);
  int goal = index_of(b);
  if (start == goal) return 0;
  std::vector<int> dist(names_.size(), -1);
  dist[start] = 0;
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int node = queue.front();
    queue.pop_front();
    auto step = [&](int next) {
      if (dist[next] != -1) return false;
      dist[next] = dist[node] + 1;
      if (next == goal) return true;
      queue.push_back(next);
      return false;
    };
    for (int p : parents_[node]) {
      if (step(p)) return dist[goal];
    }
    for (int c : children_[node]) {
      if (step(c)) return dist[goal];
    }
  }
  return -1;
}

bool TaxonomyGraph::is_ancestor_or_self(const std::string& ancestor,
                                        const std::string& node) const {
  int target = index_of(ancestor);
  int start = index_of(node);
  std::vector<bool> seen(names_.size(), false);
  std::deque<int> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    if (cur == target) return true;
    for (int p : parents_[cur]) {
      if (!seen[p]) {
        seen[p] = true;
        queue.push_back(p);
      }
    }
  }
  return false;
}

std::optional<std::string> TaxonomyGraph::closest_common_parent(
    const std::string& a, const std::string& b) const {
  int ia = index_of(a);
  int ib = index_of(b);
  auto ancestors = [&](int start) {
    std::vector<bool> seen(names_.size(), false);
    std::deque<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      for (int p : parents_[cur]) {
        if (!seen[p]) {
          seen[p] = true;
          queue.push_back(p);
        }
      }
    }
    return seen;
  };
  std::vector<bool> anc_a = ancestors(ia);
  std::vector<bool> anc_b = ancestors(ib);
  bool exclude_self = ia == ib;
  int best = -1;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!anc_a[i] || !anc_b[i]) continue;
    if (exclude_self && static_cast<int>(i) == ia) continue;
    if (best == -1 || depth_[i] > depth_[best] ||
        (depth_[i] == depth_[best] && names_[i] < names_[best])) {
      best = static_cast<int>(i);
    }
  }
  if (best == -1) return std::nullopt;
  return names_[best];
}

std::vector<Cluster> cluster_classes(const std::vector<std::string>& words,
                                     const TaxonomyGraph& g,
                                     const TaxonomyOverrides& overrides,
                                     std::vector<std::string>* warnings) {
  struct Entry {
    Cluster cluster;
    std::vector<std::string> resolved;  // parallel to cluster.words
    bool resolvable = true;
  };
  std::vector<Entry> entries;

  for (const std::string& word : words) {
    std::string node = resolve(word, overrides);
    if (!g.contains(node)) {
      if (warnings) {
        warnings->push_back("word '" + word +
                            "' does not resolve in the hypernym graph; "
                            "kept as a singleton cluster");
      }
      Entry e;
      e.cluster.words.push_back(word);
      e.resolved.push_back(node);
      e.resolvable = false;
      entries.push_back(std::move(e));
      continue;
    }
    bool placed = false;
    for (Entry& e : entries) {
      if (!e.resolvable) continue;
      // Representative: member with the smallest graph depth, earliest
      // added on ties.
      std::size_t rep = 0;
      for (std::size_t k = 1; k < e.resolved.size(); ++k) {
        if (g.depth(e.resolved[k]) < g.depth(e.resolved[rep])) rep = k;
      }
      if (g.undirected_distance(node, e.resolved[rep]) >= 0) {
        e.cluster.words.push_back(word);
        e.resolved.push_back(node);
        placed = true;
        break;
      }
    }
    if (!placed) {
      Entry e;
      e.cluster.words.push_back(word);
      e.resolved.push_back(node);
      entries.push_back(std::move(e));
    }
  }

  std::vector<Cluster> out;
  out.reserve(entries.size());
  for (Entry& e : entries) out.push_back(std::move(e.cluster));
  return out;
}

int ClassTree::add_node(const std::string& name, const std::string& graph_node,
                        int parent, bool synthetic) {
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(ClassTreeNode{name, graph_node, synthetic, parent, {}});
  if (parent >= 0) nodes_[parent].children.push_back(id);
  return id;
}

std::vector<std::string> ClassTree::words() const {
  std::vector<std::string> out;
  for (const ClassTreeNode& n : nodes_) {
    if (!n.synthetic) out.push_back(n.name);
  }
  return out;
}

ClassTree construct_tree(const Cluster& cluster, const TaxonomyGraph& g,
                         const TaxonomyOverrides& overrides,
                         std::vector<std::string>* warnings) {
  if (cluster.words.empty()) {
    throw ConfigurationError("cannot build a tree from an empty cluster");
  }
  ClassTree tree;
  const std::string& first = cluster.words.front();
  std::string first_node = resolve(first, overrides);
  if (!g.contains(first_node)) {
    throw ConfigurationError("cluster root '" + first +
                             "' does not resolve in the hypernym graph");
  }
  tree.add_node(first, first_node, -1);

  for (std::size_t w = 1; w < cluster.words.size(); ++w) {
    const std::string& word = cluster.words[w];
    std::string node = resolve(word, overrides);
    if (!g.contains(node)) {
      if (warnings) {
        warnings->push_back("word '" + word + "' is not in the graph, skipped");
      }
      continue;
    }
    int best = -1;
    int best_dist = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < tree.nodes().size(); ++k) {
      int d = g.undirected_distance(node, tree.nodes()[k].graph_node);
      if (d >= 0 && d < best_dist) {
        best_dist = d;
        best = static_cast<int>(k);
      }
    }
    if (best == -1) {
      if (warnings) {
        warnings->push_back("word '" + word +
                            "' is disconnected from the cluster, skipped");
      }
      continue;
    }
    tree.add_node(word, node, best);
  }
  return tree;
}

namespace {

// Deep-copies src under parent `attach_at` of dst (node ids shift).
int graft(ClassTree& dst, const ClassTree& src, int src_node, int attach_at) {
  const ClassTreeNode& n = src.nodes()[src_node];
  int id = dst.add_node(n.name, n.graph_node, attach_at, n.synthetic);
  for (int child : n.children) graft(dst, src, child, id);
  return id;
}

}  // namespace

ClassTree combine_trees(const ClassTree& tx, const ClassTree& ty,
                        const TaxonomyGraph& g) {
  const std::string& rx = tx.root_node().graph_node;
  const std::string& ry = ty.root_node().graph_node;
  if (!g.contains(rx) || !g.contains(ry)) {
    throw MergeFailureError("tree roots must resolve in the hypernym graph");
  }
  auto parent = g.closest_common_parent(rx, ry);
  if (!parent) {
    throw MergeFailureError("roots '" + rx + "' and '" + ry +
                            "' share no common ancestor; the hypernym graph "
                            "must be single-rooted to combine them");
  }
  ClassTree out;
  if (*parent == rx) {
    graft(out, tx, tx.root(), -1);
    graft(out, ty, ty.root(), out.root());
  } else if (*parent == ry) {
    graft(out, ty, ty.root(), -1);
    graft(out, tx, tx.root(), out.root());
  } else {
    out.add_node(*parent, *parent, -1, /*synthetic=*/true);
    graft(out, tx, tx.root(), out.root());
    graft(out, ty, ty.root(), out.root());
  }
  return out;
}

}  // namespace stgt
