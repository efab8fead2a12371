#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "walkgnn/graph.hpp"
#include "walkgnn/model.hpp"
#include "walkgnn/walks.hpp"

namespace walkgnn {

// Distances over all unordered node pairs of a collection, global ids,
// fixed lexicographic pair order so two sets over the same scope line up
// index by index.
struct DistanceSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> values;
};

// || h_v^(k) - h_u^(k) ||_2 for all pairs; one embedding table per graph.
DistanceSet pairwise_embedding_distances(const std::vector<EmbeddingTable>& tables,
                                         std::size_t k, const GraphCollection& scope);

// | s_v^(k) - s_u^(k) | for all pairs; one walk table per graph.
DistanceSet pairwise_walk_distances(const std::vector<WalkTable>& tables, std::size_t k,
                                    WalkKind kind, const GraphCollection& scope);

struct PearsonResult {
  double r = 0.0;
  bool degenerate = false;  // one side has (numerically) zero variance
};

inline constexpr double kPearsonVarianceFloor = 1e-24;

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys);

struct CorrelationReport {
  Variant variant = Variant::GIN;
  std::size_t layer = 0;
  WalkKind walk_kind = WalkKind::Raw;
  double pearson_r = 0.0;
  bool degenerate = false;
  std::size_t pair_count = 0;
  DistanceSet walk_distances;
  DistanceSet embedding_distances;

  nlohmann::json to_json() const;
  std::string scatter_csv() const;  // pair_v,pair_u,walk_dist,embed_dist
};

// Runs the model on every graph and correlates layer-k embedding distances
// against walk-statistic distances (GIN: raw counts, GCN: normalized sums,
// DGCNN/GAT: raw counts with an expected-degenerate embedding side).
CorrelationReport correlate(const GraphCollection& collection, const Model& model,
                            std::size_t k);

struct CollapseReport {
  bool pass = false;
  double max_deviation = 0.0;  // relative to 1 + max row norm
  NodeId worst_v = 0;
  NodeId worst_u = 0;
  double rel_tol = 0.0;

  nlohmann::json to_json() const;
};

// Max pairwise row distance at layer k, relative to 1 + the largest row norm.
CollapseReport collapse_check(const EmbeddingTable& table, std::size_t k, double rel_tol);

struct ProportionalityReport {
  bool pass = false;
  double max_violation = 0.0;  // relative, componentwise
  NodeId worst_v = 0;
  NodeId worst_u = 0;
  double rel_tol = 0.0;

  nlohmann::json to_json() const;
};

// Checks the scalar-multiple structure h_v^(k) * s_u = h_u^(k) * s_v
// componentwise, s being the layer-k walk statistic of the given kind.
ProportionalityReport proportionality_check(const EmbeddingTable& table, const WalkTable& walks,
                                            WalkKind kind, std::size_t k, double rel_tol);

struct ReadoutCensusReport {
  ReadoutMode mode = ReadoutMode::Sum;
  bool pass = false;
  double max_violation = 0.0;
  std::vector<std::vector<double>> graph_vectors;

  nlohmann::json to_json() const;
};

inline constexpr double kSumCensusTol = 1e-9;
inline constexpr double kMeanCensusTol = 1e-10;

// For collapsing models only. Sum readout must scale with node count
// (vectors of G_i and G_j in ratio n_i : n_j); mean readout must send every
// graph to one shared vector.
ReadoutCensusReport readout_census(const GraphCollection& collection, const Model& model,
                                   ReadoutMode mode, double tol_sum = kSumCensusTol,
                                   double tol_mean = kMeanCensusTol);

// Nodes anywhere in the collection sharing an exact walk count w^(k).
struct CollisionWitness {
  std::size_t length = 0;
  std::uint64_t shared_count = 0;
  std::vector<std::pair<std::size_t, NodeId>> nodes;  // (graph index, node)
  std::vector<std::size_t> degrees;                   // per node
  std::optional<double> max_embedding_distance;       // at layer k, when a model is given

  nlohmann::json to_json() const;
};

// Groups nodes by exact w^(k); emits groups of size >= 2, optionally only
// those whose members span at least two distinct degrees. When a model is
// supplied, the witness records the largest layer-k embedding distance
// within the group.
std::vector<CollisionWitness> find_walk_collisions(const GraphCollection& collection,
                                                   std::size_t k, bool require_distinct_degrees,
                                                   const Model* model = nullptr);

}  // namespace walkgnn
