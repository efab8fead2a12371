#include "walkgnn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "walkgnn/rng.hpp"

namespace walkgnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits on '\n'; the final fragment is emitted even without a trailing newline.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = (nl == std::string_view::npos) ? text.size() : nl;
    ++line_number;
    f(line_number, text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

// Parses exactly `count` nonnegative integers separated by whitespace and/or
// single commas; anything else is a failure.
bool parse_uints(std::string_view line, std::span<std::uint64_t> out) {
  std::size_t got = 0;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p != end) {
    if (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r') {
      ++p;
      continue;
    }
    if (got == out.size()) return false;
    std::uint64_t value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p) return false;
    out[got++] = value;
    p = next;
  }
  return got == out.size();
}

}  // namespace

Graph::Graph(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edge_list)
    : adjacency_(node_count) {
  std::set<std::pair<NodeId, NodeId>> unique;
  for (auto [u, v] : edge_list) {
    if (u == v) {
      throw ConstructionError("self-loop at node " + std::to_string(u));
    }
    if (u >= node_count || v >= node_count) {
      throw ConstructionError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") references a node outside [0, " + std::to_string(node_count) +
                              ")");
    }
    unique.emplace(std::min(u, v), std::max(u, v));
  }
  edges_.assign(unique.begin(), unique.end());
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  return adjacency_[v];
}

std::size_t Graph::degree(NodeId v) const {
  return adjacency_[v].size();
}

std::size_t Graph::min_degree() const {
  std::size_t d = adjacency_.empty() ? 0 : adjacency_[0].size();
  for (const auto& nbrs : adjacency_) d = std::min(d, nbrs.size());
  return d;
}

std::string Graph::to_edge_list_text() const {
  std::ostringstream out;
  out << "# nodes: " << node_count() << "\n";
  for (auto [u, v] : edges_) out << u << " " << v << "\n";
  return out.str();
}

nlohmann::json Graph::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, v] : edges_) edges.push_back({u, v});
  return {{"n", node_count()}, {"edges", edges}};
}

Graph Graph::from_json(const nlohmann::json& j) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& e : j.at("edges")) {
    edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  }
  return Graph(j.at("n").get<std::size_t>(), edges);
}

GraphCollection::GraphCollection(std::vector<Graph> graphs, std::optional<std::vector<long>> labels)
    : graphs_(std::move(graphs)), labels_(std::move(labels)) {
  if (labels_ && labels_->size() != graphs_.size()) {
    throw ConstructionError("labels count does not match graph count");
  }
  offsets_.reserve(graphs_.size());
  std::size_t total = 0;
  for (const Graph& g : graphs_) {
    total += g.node_count();
    offsets_.push_back(total);
  }
}

std::size_t GraphCollection::global_id(std::size_t graph_index, NodeId local) const {
  const std::size_t base = graph_index == 0 ? 0 : offsets_[graph_index - 1];
  return base + local;
}

std::pair<std::size_t, NodeId> GraphCollection::origin(std::size_t global) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  if (it == offsets_.end()) throw ConstructionError("global node id out of range");
  const std::size_t graph_index = static_cast<std::size_t>(it - offsets_.begin());
  const std::size_t base = graph_index == 0 ? 0 : offsets_[graph_index - 1];
  return {graph_index, static_cast<NodeId>(global - base)};
}

Graph parse_edge_list(std::string_view text, std::optional<std::size_t> node_count_hint) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::size_t max_index_plus_one = 0;
  for_each_line(text, [&](std::size_t line_number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    std::uint64_t uv[2];
    if (!parse_uints(line, uv)) {
      throw ParseError(line_number, "expected two nonnegative integers, got \"" +
                                        std::string(line) + "\"");
    }
    if (uv[0] == uv[1]) {
      throw ParseError(line_number,
                       "self-loop " + std::to_string(uv[0]) + " " + std::to_string(uv[1]) +
                           " (the aggregation schemes add the self term themselves)");
    }
    edges.emplace_back(static_cast<NodeId>(uv[0]), static_cast<NodeId>(uv[1]));
    max_index_plus_one = std::max<std::size_t>(max_index_plus_one, std::max(uv[0], uv[1]) + 1);
  });
  const std::size_t n = std::max(node_count_hint.value_or(0), max_index_plus_one);
  return Graph(n, edges);
}

GraphCollection parse_tu_collection(std::string_view adjacency_text,
                                    std::string_view indicator_text,
                                    std::optional<std::string_view> labels_text) {
  // Node i (1-based) belongs to graph_of[i-1] (1-based graph id).
  std::vector<std::size_t> graph_of;
  for_each_line(indicator_text, [&](std::size_t line_number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty()) return;
    std::uint64_t id[1];
    if (!parse_uints(line, id) || id[0] == 0) {
      throw FormatError("indicator line " + std::to_string(line_number) +
                        ": expected a positive graph id");
    }
    graph_of.push_back(id[0]);
  });

  const std::size_t graph_count =
      graph_of.empty() ? 0 : *std::max_element(graph_of.begin(), graph_of.end());
  std::vector<std::size_t> nodes_per_graph(graph_count, 0);
  std::vector<NodeId> local_id(graph_of.size());
  for (std::size_t i = 0; i < graph_of.size(); ++i) {
    const std::size_t g = graph_of[i] - 1;
    local_id[i] = static_cast<NodeId>(nodes_per_graph[g]++);
  }
  for (std::size_t g = 0; g < graph_count; ++g) {
    if (nodes_per_graph[g] == 0) {
      throw FormatError("gap in graph ids: graph " + std::to_string(g + 1) + " has no nodes");
    }
  }

  std::vector<std::vector<std::pair<NodeId, NodeId>>> edges(graph_count);
  for_each_line(adjacency_text, [&](std::size_t line_number, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    std::uint64_t ij[2];
    if (!parse_uints(line, ij)) {
      throw FormatError("adjacency line " + std::to_string(line_number) +
                        ": expected \"i, j\", got \"" + std::string(line) + "\"");
    }
    if (ij[0] == 0 || ij[1] == 0 || ij[0] > graph_of.size() || ij[1] > graph_of.size()) {
      throw FormatError("adjacency line " + std::to_string(line_number) +
                        ": node id outside the declared range");
    }
    const std::size_t i = ij[0] - 1, j = ij[1] - 1;
    if (graph_of[i] != graph_of[j]) {
      throw FormatError("adjacency line " + std::to_string(line_number) + ": edge " +
                        std::to_string(ij[0]) + "-" + std::to_string(ij[1]) +
                        " crosses graphs " + std::to_string(graph_of[i]) + " and " +
                        std::to_string(graph_of[j]));
    }
    if (i == j) {
      throw FormatError("adjacency line " + std::to_string(line_number) + ": self-loop on node " +
                        std::to_string(ij[0]));
    }
    edges[graph_of[i] - 1].emplace_back(local_id[i], local_id[j]);
  });

  std::optional<std::vector<long>> labels;
  if (labels_text) {
    labels.emplace();
    for_each_line(*labels_text, [&](std::size_t line_number, std::string_view raw) {
      const std::string_view line = trim(raw);
      if (line.empty()) return;
      long value = 0;
      auto [next, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
      if (ec != std::errc() || next != line.data() + line.size()) {
        throw FormatError("labels line " + std::to_string(line_number) +
                          ": expected one integer");
      }
      labels->push_back(value);
    });
    if (labels->size() != graph_count) {
      throw FormatError("labels count " + std::to_string(labels->size()) +
                        " does not match graph count " + std::to_string(graph_count));
    }
  }

  std::vector<Graph> graphs;
  graphs.reserve(graph_count);
  for (std::size_t g = 0; g < graph_count; ++g) {
    graphs.emplace_back(nodes_per_graph[g], edges[g]);
  }
  return GraphCollection(std::move(graphs), std::move(labels));
}

namespace {

Graph make_path(std::size_t n) {
  if (n < 1) throw ConstructionError("path: n must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph make_cycle(std::size_t n) {
  if (n < 3) throw ConstructionError("cycle: n must be >= 3");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(static_cast<NodeId>(n - 1), 0);
  return Graph(n, edges);
}

Graph make_star(std::size_t leaves) {
  if (leaves < 1) throw ConstructionError("star: leaf count must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return Graph(leaves + 1, edges);
}

Graph make_complete(std::size_t n) {
  if (n < 1) throw ConstructionError("complete: n must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, edges);
}

Graph make_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw ConstructionError("erdos-renyi: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ConstructionError("erdos-renyi: p must lie in [0, 1]");
  SplitMix64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  // One coin per unordered pair, in lexicographic order; this fixes the
  // graph as a pure function of (n, p, seed).
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.next_double() < p) edges.emplace_back(u, v);
    }
  }
  return Graph(n, edges);
}

// Red node 0 is a leaf on a hub of degree 7. The hub's other six neighbors
// form a 6-cycle, so within this graph only the red leaf has w^(2) = 10:
// 2 (own one-step walks) + 8 (hub's one-step walks).
Graph make_fig2_leaf_on_hub() {
  std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}};
  for (NodeId i = 2; i <= 7; ++i) edges.emplace_back(1, i);
  for (NodeId i = 2; i < 7; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(7, 2);
  return Graph(8, edges);
}

// Red node 0 has degree 2 with neighbors of degrees 2 and 3:
// w^(2) = 3 + 3 + 4 = 10.
Graph make_fig2_deg2_node() {
  return Graph(6, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {2, 5}});
}

// Red node 0 is the center of a 3-leaf star: w^(2) = 4 + 3*2 = 10.
Graph make_fig2_star3() {
  return make_star(3);
}

}  // namespace

SyntheticSpec SyntheticSpec::parse(std::string_view text) {
  SyntheticSpec spec;
  std::string_view kind = text;
  std::string_view params;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    kind = text.substr(0, colon);
    params = text.substr(colon + 1);
  }

  if (kind == "erdos-renyi") spec.kind = SyntheticKind::ErdosRenyi;
  else if (kind == "path") spec.kind = SyntheticKind::Path;
  else if (kind == "cycle") spec.kind = SyntheticKind::Cycle;
  else if (kind == "star") spec.kind = SyntheticKind::Star;
  else if (kind == "complete") spec.kind = SyntheticKind::Complete;
  else if (kind == "fig2-leaf-on-hub") spec.kind = SyntheticKind::Fig2LeafOnHub;
  else if (kind == "fig2-deg2-node") spec.kind = SyntheticKind::Fig2Deg2Node;
  else if (kind == "fig2-star3") spec.kind = SyntheticKind::Fig2Star3;
  else throw ConstructionError("unknown synthetic kind \"" + std::string(kind) + "\"");

  while (!params.empty()) {
    const auto comma = params.find(',');
    const std::string_view item =
        comma == std::string_view::npos ? params : params.substr(0, comma);
    params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConstructionError("synthetic spec: expected key=value, got \"" + std::string(item) +
                              "\"");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string value(item.substr(eq + 1));
    try {
      if (key == "n") spec.n = std::stoull(value);
      else if (key == "leaves") spec.n = std::stoull(value);
      else if (key == "p") spec.edge_probability = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else throw ConstructionError("synthetic spec: unknown key \"" + std::string(key) + "\"");
    } catch (const std::invalid_argument&) {
      throw ConstructionError("synthetic spec: bad value \"" + value + "\" for key \"" +
                              std::string(key) + "\"");
    }
  }
  return spec;
}

std::string SyntheticSpec::to_string() const {
  switch (kind) {
    case SyntheticKind::ErdosRenyi:
      return "erdos-renyi:n=" + std::to_string(n) + ",p=" + std::to_string(edge_probability) +
             ",seed=" + std::to_string(seed);
    case SyntheticKind::Path: return "path:n=" + std::to_string(n);
    case SyntheticKind::Cycle: return "cycle:n=" + std::to_string(n);
    case SyntheticKind::Star: return "star:leaves=" + std::to_string(n);
    case SyntheticKind::Complete: return "complete:n=" + std::to_string(n);
    case SyntheticKind::Fig2LeafOnHub: return "fig2-leaf-on-hub";
    case SyntheticKind::Fig2Deg2Node: return "fig2-deg2-node";
    case SyntheticKind::Fig2Star3: return "fig2-star3";
  }
  return "";
}

Graph generate(const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::ErdosRenyi:
      return make_erdos_renyi(spec.n, spec.edge_probability, spec.seed);
    case SyntheticKind::Path: return make_path(spec.n);
    case SyntheticKind::Cycle: return make_cycle(spec.n);
    case SyntheticKind::Star: return make_star(spec.n);
    case SyntheticKind::Complete: return make_complete(spec.n);
    case SyntheticKind::Fig2LeafOnHub: return make_fig2_leaf_on_hub();
    case SyntheticKind::Fig2Deg2Node: return make_fig2_deg2_node();
    case SyntheticKind::Fig2Star3: return make_fig2_star3();
  }
  throw ConstructionError("unreachable synthetic kind");
}

}  // namespace walkgnn
