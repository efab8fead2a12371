#include "walkgnn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "walkgnn/format.hpp"

namespace walkgnn {

namespace {

template <typename ValueAt>
DistanceSet all_pairs(const GraphCollection& scope, ValueAt&& distance) {
  const std::size_t total = scope.total_nodes();
  DistanceSet set;
  set.pairs.reserve(total * (total - 1) / 2);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = a + 1; b < total; ++b) {
      set.pairs.emplace_back(a, b);
      set.values.push_back(distance(a, b));
    }
  }
  return set;
}

}  // namespace

DistanceSet pairwise_embedding_distances(const std::vector<EmbeddingTable>& tables,
                                         std::size_t k, const GraphCollection& scope) {
  if (tables.size() != scope.size())
    throw UsageError("pairwise_embedding_distances: one table per graph required");
  return all_pairs(scope, [&](std::size_t a, std::size_t b) {
    const auto [ga, va] = scope.origin(a);
    const auto [gb, vb] = scope.origin(b);
    return euclidean_distance(tables[ga].at(k).row(va), tables[gb].at(k).row(vb));
  });
}

DistanceSet pairwise_walk_distances(const std::vector<WalkTable>& tables, std::size_t k,
                                    WalkKind kind, const GraphCollection& scope) {
  if (tables.size() != scope.size())
    throw UsageError("pairwise_walk_distances: one table per graph required");
  if (kind == WalkKind::Both) throw UsageError("pairwise_walk_distances: pick raw or normalized");
  const auto stat = [&](std::size_t global) {
    const auto [g, v] = scope.origin(global);
    if (kind == WalkKind::Raw) {
      if (!tables[g].has_raw()) throw UsageError("walk table has no raw counts");
      return static_cast<double>(tables[g].counts[v][k]);
    }
    if (!tables[g].has_normalized()) throw UsageError("walk table has no normalized sums");
    return tables[g].normalized[v][k];
  };
  return all_pairs(scope,
                   [&](std::size_t a, std::size_t b) { return std::abs(stat(a) - stat(b)); });
}

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DimensionError("pearson: length mismatch");
  if (xs.size() < 2) throw UsageError("pearson: need at least two samples");
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= kPearsonVarianceFloor || syy <= kPearsonVarianceFloor) {
    return {0.0, true};
  }
  return {sxy / std::sqrt(sxx * syy), false};
}

CorrelationReport correlate(const GraphCollection& collection, const Model& model,
                            std::size_t k) {
  if (k == 0 || k > model.depth()) throw UsageError("correlate: layer index out of range");
  const WalkKind kind = model.spec.variant == Variant::GCN ? WalkKind::Normalized : WalkKind::Raw;

  std::vector<EmbeddingTable> embeddings;
  std::vector<WalkTable> walks;
  embeddings.reserve(collection.size());
  walks.reserve(collection.size());
  for (const Graph& g : collection.graphs()) {
    embeddings.push_back(forward(g, model));
    walks.push_back(kind == WalkKind::Raw ? walk_counts(g, k) : normalized_walk_sums(g, k));
  }

  CorrelationReport report;
  report.variant = model.spec.variant;
  report.layer = k;
  report.walk_kind = kind;
  report.walk_distances = pairwise_walk_distances(walks, k, kind, collection);
  report.embedding_distances = pairwise_embedding_distances(embeddings, k, collection);
  report.pair_count = report.walk_distances.values.size();
  const PearsonResult r = pearson(report.walk_distances.values, report.embedding_distances.values);
  report.pearson_r = r.r;
  report.degenerate = r.degenerate;
  return report;
}

nlohmann::json CorrelationReport::to_json() const {
  return {{"variant", to_string(variant)},
          {"layer", layer},
          {"walk_kind", walk_kind == WalkKind::Raw ? "raw" : "normalized"},
          {"pearson_r", pearson_r},
          {"degenerate", degenerate},
          {"pair_count", pair_count}};
}

std::string CorrelationReport::scatter_csv() const {
  std::ostringstream out;
  out << "pair_v,pair_u,walk_dist,embed_dist\n";
  for (std::size_t i = 0; i < pair_count; ++i) {
    out << walk_distances.pairs[i].first << "," << walk_distances.pairs[i].second << ","
        << format_double(walk_distances.values[i]) << ","
        << format_double(embedding_distances.values[i]) << "\n";
  }
  return out.str();
}

CollapseReport collapse_check(const EmbeddingTable& table, std::size_t k, double rel_tol) {
  const DenseMatrix& h = table.at(k);
  double max_norm = 0.0;
  for (std::size_t v = 0; v < h.rows; ++v) max_norm = std::max(max_norm, norm2(h.row(v)));

  CollapseReport report;
  report.rel_tol = rel_tol;
  const double scale = 1.0 + max_norm;
  for (NodeId v = 0; v < h.rows; ++v) {
    for (NodeId u = v + 1; u < h.rows; ++u) {
      const double d = euclidean_distance(h.row(v), h.row(u)) / scale;
      if (d > report.max_deviation) {
        report.max_deviation = d;
        report.worst_v = v;
        report.worst_u = u;
      }
    }
  }
  report.pass = report.max_deviation <= rel_tol;
  return report;
}

nlohmann::json CollapseReport::to_json() const {
  return {{"pass", pass},
          {"max_deviation", max_deviation},
          {"worst_pair", {worst_v, worst_u}},
          {"rel_tol", rel_tol}};
}

ProportionalityReport proportionality_check(const EmbeddingTable& table, const WalkTable& walks,
                                            WalkKind kind, std::size_t k, double rel_tol) {
  if (kind == WalkKind::Both) throw UsageError("proportionality_check: pick raw or normalized");
  if (kind == WalkKind::Raw && !walks.has_raw())
    throw UsageError("proportionality_check: walk table has no raw counts");
  if (kind == WalkKind::Normalized && !walks.has_normalized())
    throw UsageError("proportionality_check: walk table has no normalized sums");
  if (walks.max_length < k) throw UsageError("proportionality_check: walk table too short");

  const DenseMatrix& h = table.at(k);
  if (walks.node_count() != h.rows)
    throw UsageError("proportionality_check: walk table and embeddings disagree on node count");

  const auto stat = [&](NodeId v) {
    return kind == WalkKind::Raw ? static_cast<double>(walks.counts[v][k])
                                 : walks.normalized[v][k];
  };

  ProportionalityReport report;
  report.rel_tol = rel_tol;
  for (NodeId v = 0; v < h.rows; ++v) {
    for (NodeId u = v + 1; u < h.rows; ++u) {
      const double sv = stat(v);
      const double su = stat(u);
      for (std::size_t c = 0; c < h.cols; ++c) {
        const double lhs = h(v, c) * su;
        const double rhs = h(u, c) * sv;
        const double denom = std::max(std::abs(lhs), std::abs(rhs));
        if (denom == 0.0) continue;
        const double violation = std::abs(lhs - rhs) / denom;
        if (violation > report.max_violation) {
          report.max_violation = violation;
          report.worst_v = v;
          report.worst_u = u;
        }
      }
    }
  }
  report.pass = report.max_violation <= rel_tol;
  return report;
}

nlohmann::json ProportionalityReport::to_json() const {
  return {{"pass", pass},
          {"max_violation", max_violation},
          {"worst_pair", {worst_v, worst_u}},
          {"rel_tol", rel_tol}};
}

ReadoutCensusReport readout_census(const GraphCollection& collection, const Model& model,
                                   ReadoutMode mode, double tol_sum, double tol_mean) {
  if (model.spec.variant != Variant::DGCNN && model.spec.variant != Variant::GAT)
    throw UsageError("readout_census: needs a collapsing model (dgcnn or gat)");

  ReadoutCensusReport report;
  report.mode = mode;
  for (const Graph& g : collection.graphs()) {
    report.graph_vectors.push_back(readout(forward(g, model), mode));
  }

  const std::size_t count = report.graph_vectors.size();
  if (mode == ReadoutMode::Sum) {
    // h_i * n_j == h_j * n_i componentwise: the vector can only count nodes.
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        const double ni = static_cast<double>(collection.graph(i).node_count());
        const double nj = static_cast<double>(collection.graph(j).node_count());
        const auto& hi = report.graph_vectors[i];
        const auto& hj = report.graph_vectors[j];
        for (std::size_t c = 0; c < hi.size(); ++c) {
          const double lhs = hi[c] * nj;
          const double rhs = hj[c] * ni;
          const double denom = std::max(std::abs(lhs), std::abs(rhs));
          if (denom == 0.0) continue;
          report.max_violation = std::max(report.max_violation, std::abs(lhs - rhs) / denom);
        }
      }
    }
    report.pass = report.max_violation <= tol_sum;
  } else {
    double max_norm = 0.0;
    for (const auto& h : report.graph_vectors) max_norm = std::max(max_norm, norm2(h));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        const double d =
            euclidean_distance(report.graph_vectors[i], report.graph_vectors[j]) /
            (1.0 + max_norm);
        report.max_violation = std::max(report.max_violation, d);
      }
    }
    report.pass = report.max_violation <= tol_mean;
  }
  return report;
}

nlohmann::json ReadoutCensusReport::to_json() const {
  return {{"mode", mode == ReadoutMode::Sum ? "sum" : "mean"},
          {"pass", pass},
          {"max_violation", max_violation},
          {"graph_vectors", graph_vectors}};
}

std::vector<CollisionWitness> find_walk_collisions(const GraphCollection& collection,
                                                   std::size_t k, bool require_distinct_degrees,
                                                   const Model* model) {
  if (k == 0) throw UsageError("find_walk_collisions: k must be >= 1");

  std::map<std::uint64_t, std::vector<std::pair<std::size_t, NodeId>>> groups;
  std::vector<WalkTable> walks;
  walks.reserve(collection.size());
  for (std::size_t g = 0; g < collection.size(); ++g) {
    walks.push_back(walk_counts(collection.graph(g), k));
    for (NodeId v = 0; v < collection.graph(g).node_count(); ++v) {
      groups[walks[g].counts[v][k]].emplace_back(g, v);
    }
  }

  std::vector<EmbeddingTable> embeddings;
  if (model) {
    if (k > model->depth())
      throw UsageError("find_walk_collisions: model too shallow for layer k");
    embeddings.reserve(collection.size());
    for (const Graph& g : collection.graphs()) embeddings.push_back(forward(g, *model));
  }

  std::vector<CollisionWitness> witnesses;
  for (const auto& [count, members] : groups) {
    if (members.size() < 2) continue;
    CollisionWitness witness;
    witness.length = k;
    witness.shared_count = count;
    witness.nodes = members;
    for (auto [g, v] : members) witness.degrees.push_back(collection.graph(g).degree(v));
    if (require_distinct_degrees) {
      std::vector<std::size_t> sorted = witness.degrees;
      std::sort(sorted.begin(), sorted.end());
      if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2) continue;
    }
    if (model) {
      double max_dist = 0.0;
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const auto [ga, va] = members[a];
          const auto [gb, vb] = members[b];
          max_dist = std::max(max_dist, euclidean_distance(embeddings[ga].at(k).row(va),
                                                           embeddings[gb].at(k).row(vb)));
        }
      }
      witness.max_embedding_distance = max_dist;
    }
    witnesses.push_back(std::move(witness));
  }
  return witnesses;
}

nlohmann::json CollisionWitness::to_json() const {
  nlohmann::json node_array = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    node_array.push_back(
        {{"graph", nodes[i].first}, {"node", nodes[i].second}, {"degree", degrees[i]}});
  }
  nlohmann::json j{{"length", length}, {"count", shared_count}, {"nodes", node_array}};
  if (max_embedding_distance) j["max_embedding_distance"] = *max_embedding_distance;
  return j;
}

}  // namespace walkgnn
