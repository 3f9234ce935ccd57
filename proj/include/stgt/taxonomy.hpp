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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stgt/error.hpp"

namespace stgt {

/// Directed acyclic hypernym graph (child -> parent edges). Multiple parents
/// are allowed; node depth is the shortest edge distance to a root (roots
/// have depth 0).
class TaxonomyGraph {
 public:
  static TaxonomyGraph from_edges(
      const std::vector<std::pair<std::string, std::string>>& child_parent);

  bool contains(const std::string& name) const;
  int depth(const std::string& name) const;
  std::vector<std::string> roots() const;
  std::vector<std::string> parents(const std::string& name) const;
  std::size_t node_count() const { return names_.size(); }

  /// Shortest path length treating hypernym edges as undirected;
  /// -1 when the nodes are in different components.
  int undirected_distance(const std::string& a, const std::string& b) const;

  /// True when b is reachable from a following child->parent edges,
  /// including a == b.
  bool is_ancestor_or_self(const std::string& ancestor,
                           const std::string& node) const;

  /// Deepest node that is an ancestor-or-self of both arguments. When the
  /// arguments are the same node, the node itself is excluded so the result
  /// is a proper parent. Ties on depth resolve to the lexicographically
  /// smallest name. Empty when no common ancestor exists.
  std::optional<std::string> closest_common_parent(const std::string& a,
                                                   const std::string& b) const;

 private:
  int index_of(const std::string& name) const;

  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
};

/// Word -> graph-node remapping for manual polysemy corrections.
using TaxonomyOverrides = std::map<std::string, std::string>;

struct Cluster {
  std::vector<std::string> words;
};

/// Scans words in order and assigns each to the first existing cluster whose
/// highest-level representative (smallest depth; ties to the earliest added
/// word) has an undirected hypernym path to it; otherwise the word starts a
/// new cluster. Words that do not resolve in the graph become singleton
/// clusters with a warning.
std::vector<Cluster> cluster_classes(const std::vector<std::string>& words,
                                     const TaxonomyGraph& g,
                                     const TaxonomyOverrides& overrides = {},
                                     std::vector<std::string>* warnings = nullptr);

struct ClassTreeNode {
  std::string name;        // annotated class name, or graph node if synthetic
  std::string graph_node;  // resolved hypernym-graph node
  bool synthetic = false;  // introduced by a merge, not an annotated class
  int parent = -1;
  std::vector<int> children;
};

/// Rooted class tree; nodes are stored in insertion order, node 0 is the
/// root at construction time (combine_trees may re-root).
class ClassTree {
 public:
  const std::vector<ClassTreeNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const ClassTreeNode& root_node() const { return nodes_[root_]; }

  int add_node(const std::string& name, const std::string& graph_node,
               int parent, bool synthetic = false);
  void reroot(int new_root) { root_ = new_root; }

  /// Non-synthetic node names in insertion order.
  std::vector<std::string> words() const;

 private:
  std::vector<ClassTreeNode> nodes_;
  int root_ = 0;
};

/// Builds a tree from a cluster: the first word roots the tree, every later
/// word attaches under the existing node with the shortest undirected
/// hypernym path (ties to the earliest-inserted node). Disconnected words
/// are skipped with a warning.
ClassTree construct_tree(const Cluster& cluster, const TaxonomyGraph& g,
                         const TaxonomyOverrides& overrides = {},
                         std::vector<std::string>* warnings = nullptr);

/// Merges two trees under the closest common parent of their roots. When
/// that parent is one of the two roots, the other tree attaches beneath it;
/// otherwise a synthetic node roots both. Throws MergeFailureError when the
/// roots share no ancestor.
ClassTree combine_trees(const ClassTree& tx, const ClassTree& ty,
                        const TaxonomyGraph& g);

}  // namespace stgt
