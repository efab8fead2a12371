#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "walkgnn/errors.hpp"

namespace walkgnn {

using NodeId = std::uint32_t;

// Immutable undirected simple graph in adjacency form. No self-loops and no
// duplicate edges are ever stored: the aggregation schemes add their own self
// contribution (N(v) u {v}), so a stored self-loop would double-count.
class Graph {
 public:
  Graph() = default;

  // Edges are symmetrized and deduplicated; indices must lie in [0, n).
  // A self-loop or out-of-range endpoint raises ConstructionError.
  Graph(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edge_list);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId v) const;  // ascending
  std::size_t degree(NodeId v) const;
  std::size_t min_degree() const;

  // Canonical edge set: u < v within each pair, pairs sorted.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

  // Visits N(v) u {v} in ascending node-index order. Every aggregation and
  // summation in this library walks neighborhoods through here so that runs
  // are bit-reproducible.
  template <typename F>
  void for_each_closed_neighbor(NodeId v, F&& f) const {
    bool self_done = false;
    for (NodeId u : adjacency_[v]) {
      if (!self_done && v < u) {
        f(v);
        self_done = true;
      }
      f(u);
    }
    if (!self_done) f(v);
  }

  std::string to_edge_list_text() const;
  nlohmann::json to_json() const;  // {n, edges:[[u,v],...]} with u<v, sorted
  static Graph from_json(const nlohmann::json& j);

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

// An ordered list of graphs with optional per-graph integer labels and a
// global node numbering (graph 0 first, then graph 1, ...).
class GraphCollection {
 public:
  GraphCollection() = default;
  explicit GraphCollection(std::vector<Graph> graphs,
                           std::optional<std::vector<long>> labels = std::nullopt);

  const std::vector<Graph>& graphs() const { return graphs_; }
  const Graph& graph(std::size_t i) const { return graphs_[i]; }
  std::size_t size() const { return graphs_.size(); }
  const std::optional<std::vector<long>>& labels() const { return labels_; }

  std::size_t total_nodes() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t global_id(std::size_t graph_index, NodeId local) const;
  // global node id -> (graph index, local node id)
  std::pair<std::size_t, NodeId> origin(std::size_t global) const;

 private:
  std::vector<Graph> graphs_;
  std::optional<std::vector<long>> labels_;
  std::vector<std::size_t> offsets_;  // offsets_[i] = nodes in graphs 0..i
};

// Edge-list text: "u v" per line, '#' comment lines and blank lines ignored.
// Self-loop lines are rejected (the update equations add the self term).
Graph parse_edge_list(std::string_view text,
                      std::optional<std::size_t> node_count_hint = std::nullopt);

// TU-style multi-graph input: adjacency lines "i, j" (comma or whitespace
// separated, 1-based), one graph id per node line in the indicator, optional
// one label per graph. Edges appear in both directions and are deduplicated.
GraphCollection parse_tu_collection(std::string_view adjacency_text,
                                    std::string_view indicator_text,
                                    std::optional<std::string_view> labels_text = std::nullopt);

enum class SyntheticKind {
  ErdosRenyi,
  Path,
  Cycle,
  Star,
  Complete,
  Fig2LeafOnHub,
  Fig2Deg2Node,
  Fig2Star3,
};

// The red node of every fig2-* construction is node 0.
inline constexpr NodeId kFig2RedNode = 0;

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Path;
  std::size_t n = 0;             // node count; leaf count for Star
  double edge_probability = 0.0; // ErdosRenyi only
  std::uint64_t seed = 0;        // randomized kinds only

  // Mini-grammar "kind" or "kind:key=value,...", keys n, p, leaves, seed.
  static SyntheticSpec parse(std::string_view text);
  std::string to_string() const;
};

// Deterministic: equal spec (including seed) gives an identical Graph.
Graph generate(const SyntheticSpec& spec);

}  // namespace walkgnn
