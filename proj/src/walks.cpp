#include "walkgnn/walks.hpp"

#include <cmath>
#include <sstream>

#include "walkgnn/format.hpp"

namespace walkgnn {

WalkTable walk_counts(const Graph& graph, std::size_t max_length) {
  const std::size_t n = graph.node_count();
  WalkTable table;
  table.max_length = max_length;
  table.kind = WalkKind::Raw;
  table.counts.assign(n, std::vector<std::uint64_t>(max_length + 1, 0));
  for (NodeId v = 0; v < n; ++v) table.counts[v][0] = 1;
  for (std::size_t k = 1; k <= max_length; ++k) {
    for (NodeId v = 0; v < n; ++v) {
      std::uint64_t acc = 0;
      graph.for_each_closed_neighbor(v, [&](NodeId u) {
        if (__builtin_add_overflow(acc, table.counts[u][k - 1], &acc)) {
          throw WalkOverflowError(v, k);
        }
      });
      table.counts[v][k] = acc;
    }
  }
  return table;
}

WalkTable normalized_walk_sums(const Graph& graph, std::size_t max_length) {
  const std::size_t n = graph.node_count();
  WalkTable table;
  table.max_length = max_length;
  table.kind = WalkKind::Normalized;
  table.normalized.assign(n, std::vector<double>(max_length + 1, 0.0));
  for (NodeId v = 0; v < n; ++v) table.normalized[v][0] = 1.0;
  for (std::size_t k = 1; k <= max_length; ++k) {
    for (NodeId v = 0; v < n; ++v) {
      const double dv = static_cast<double>(graph.degree(v));
      double acc = 0.0;
      graph.for_each_closed_neighbor(v, [&](NodeId u) {
        const double du = static_cast<double>(graph.degree(u));
        acc += table.normalized[u][k - 1] / std::sqrt((1.0 + dv) * (1.0 + du));
      });
      table.normalized[v][k] = acc;
    }
  }
  return table;
}

WalkTable walk_census(const Graph& graph, std::size_t max_length) {
  WalkTable raw = walk_counts(graph, max_length);
  WalkTable norm = normalized_walk_sums(graph, max_length);
  raw.kind = WalkKind::Both;
  raw.normalized = std::move(norm.normalized);
  return raw;
}

namespace {

std::uint64_t count_walks_rec(const Graph& graph, NodeId v, std::size_t k,
                              std::uint64_t& budget) {
  if (budget == 0) throw BudgetError("walk enumeration budget exhausted");
  --budget;
  if (k == 0) return 1;
  std::uint64_t total = 0;
  graph.for_each_closed_neighbor(v, [&](NodeId u) {
    total += count_walks_rec(graph, u, k - 1, budget);
  });
  return total;
}

// `prefix` carries the weight factors of the vertices visited so far; the
// current vertex v still owes its factor, which depends on whether it ends
// the walk (sqrt) or sits in the interior (full 1 + d).
double sum_walk_weights_rec(const Graph& graph, NodeId v, std::size_t remaining, double prefix,
                            std::uint64_t& budget) {
  if (budget == 0) throw BudgetError("walk enumeration budget exhausted");
  --budget;
  const double dv = static_cast<double>(graph.degree(v));
  if (remaining == 0) return prefix / std::sqrt(1.0 + dv);
  double total = 0.0;
  const double interior = prefix / (1.0 + dv);
  graph.for_each_closed_neighbor(v, [&](NodeId u) {
    total += sum_walk_weights_rec(graph, u, remaining - 1, interior, budget);
  });
  return total;
}

}  // namespace

std::uint64_t enumerate_walks_bruteforce(const Graph& graph, NodeId v, std::size_t k,
                                         std::uint64_t budget) {
  return count_walks_rec(graph, v, k, budget);
}

double enumerate_normalized_walks_bruteforce(const Graph& graph, NodeId v, std::size_t k,
                                             std::uint64_t budget) {
  if (k == 0) {
    if (budget == 0) throw BudgetError("walk enumeration budget exhausted");
    return 1.0;
  }
  const double dv = static_cast<double>(graph.degree(v));
  double total = 0.0;
  const double start = 1.0 / std::sqrt(1.0 + dv);
  graph.for_each_closed_neighbor(v, [&](NodeId u) {
    total += sum_walk_weights_rec(graph, u, k - 1, start, budget);
  });
  return total;
}

std::string WalkTable::to_csv() const {
  std::ostringstream out;
  out << "node,k,count,normalized\n";
  const std::size_t n = node_count();
  for (NodeId v = 0; v < n; ++v) {
    for (std::size_t k = 0; k <= max_length; ++k) {
      out << v << "," << k << ",";
      if (has_raw()) out << counts[v][k];
      out << ",";
      if (has_normalized()) out << format_double(normalized[v][k]);
      out << "\n";
    }
  }
  return out.str();
}

nlohmann::json WalkTable::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  const std::size_t n = node_count();
  for (NodeId v = 0; v < n; ++v) {
    nlohmann::json entry{{"node", v}};
    if (has_raw()) entry["counts"] = counts[v];
    if (has_normalized()) entry["normalized"] = normalized[v];
    nodes.push_back(std::move(entry));
  }
  return {{"max_length", max_length},
          {"kind", kind == WalkKind::Raw        ? "raw"
                   : kind == WalkKind::Normalized ? "normalized"
                                                  : "both"},
          {"nodes", nodes}};
}

}  // namespace walkgnn
