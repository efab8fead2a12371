#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "walkgnn/graph.hpp"

namespace walkgnn {

// A walk of length k is a sequence of k steps on the self-loop-augmented
// graph: each step moves inside N(v) u {v}. Both GIN-0 and GCN aggregate over
// that closed neighborhood, which is why plain-adjacency walks are not
// offered at all.
enum class WalkKind { Raw, Normalized, Both };

// Per-node walk statistics for lengths 0..max_length.
//   counts[v][k]     = number of length-k walks starting at v (exact integers)
//   normalized[v][k] = degree-normalized walk sum: each walk weighted by the
//                      inverse product of (1 + degree) over its interior
//                      vertices and the square roots of (1 + degree) at its
//                      two endpoints.
struct WalkTable {
  std::size_t max_length = 0;
  WalkKind kind = WalkKind::Raw;
  std::vector<std::vector<std::uint64_t>> counts;    // empty unless Raw/Both
  std::vector<std::vector<double>> normalized;       // empty unless Normalized/Both

  std::size_t node_count() const {
    return counts.empty() ? normalized.size() : counts.size();
  }
  bool has_raw() const { return kind != WalkKind::Normalized; }
  bool has_normalized() const { return kind != WalkKind::Raw; }

  std::string to_csv() const;  // header: node,k,count,normalized
  nlohmann::json to_json() const;
};

// counts[v][k] = ((A+I)^k 1)_v in checked 64-bit integer arithmetic.
// Overflow raises WalkOverflowError naming the node and length.
WalkTable walk_counts(const Graph& graph, std::size_t max_length);

// normalized[v][k] = (S^k 1)_v for S = (D+I)^{-1/2} (A+I) (D+I)^{-1/2},
// accumulated in ascending neighbor order so runs are bit-reproducible.
WalkTable normalized_walk_sums(const Graph& graph, std::size_t max_length);

// Both statistics in one table (kind Both).
WalkTable walk_census(const Graph& graph, std::size_t max_length);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 50'000'000;

// Independent oracle: explicit depth-first enumeration of all step sequences
// (v = v_0, v_1, ..., v_k) with v_{i+1} in N(v_i) u {v_i}. Intended for tiny
// graphs; raises BudgetError beyond `budget` visited sequence prefixes.
std::uint64_t enumerate_walks_bruteforce(const Graph& graph, NodeId v, std::size_t k,
                                         std::uint64_t budget = kDefaultEnumerationBudget);

// Same enumeration, summing each walk's normalization weight
//   1 / ((1+d(v_1)) ... (1+d(v_{k-1})) * sqrt((1+d(v_0)) (1+d(v_k))))
// instead of counting. Deliberately computes the weight from the prose
// product form, not from the normalized-operator powers it cross-checks.
double enumerate_normalized_walks_bruteforce(const Graph& graph, NodeId v, std::size_t k,
                                             std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace walkgnn
