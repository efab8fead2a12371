#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "walkgnn/matrix.hpp"
#include "walkgnn/model.hpp"
#include "walkgnn/walks.hpp"

namespace walkgnn {

struct SpectralNormResult {
  double value = 0.0;
  double residual = 0.0;  // last |estimate change|
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double kSpectralNormTol = 1e-10;
inline constexpr std::size_t kSpectralNormMaxIter = 10000;

// Largest singular value via power iteration on the Gram operator W^T W,
// starting from the all-ones vector. After the Rayleigh estimate stagnates,
// one deterministically perturbed restart guards against a start vector
// orthogonal to the top singular space.
SpectralNormResult spectral_norm_detailed(const DenseMatrix& w, double tol = kSpectralNormTol,
                                          std::size_t max_iter = kSpectralNormMaxIter);

// Same, but raises ConvergenceError (carrying the last estimate and residual)
// instead of reporting converged = false.
double spectral_norm(const DenseMatrix& w, double tol = kSpectralNormTol,
                     std::size_t max_iter = kSpectralNormMaxIter);

// Lipschitz constant of a layer under the Euclidean norm: the spectral norm
// for a single linear layer; for an MLP, the product of sublayer spectral
// norms (ReLU is 1-Lipschitz), an upper bound that keeps the walk-distance
// inequality valid.
double layer_lipschitz(const LinearLayer& layer);
double layer_lipschitz(const MLPBlock& mlp);

// Per-aggregation-layer constants L_f^(i) and their running products.
struct LipschitzProfile {
  std::vector<double> per_layer;
  std::vector<double> cumulative;  // cumulative[k] = product of per_layer[0..k]

  nlohmann::json to_json() const;
  std::string to_csv() const;  // layer,lipschitz,cumulative
};

LipschitzProfile lipschitz_profile(const Model& model);

// One evaluated node pair of the walk-distance bound.
struct BoundPair {
  NodeId v = 0;
  NodeId u = 0;
  double lhs = 0.0;    // || h_v^(k) - h_u^(k) ||_2
  double rhs = 0.0;    // prod_{i<=k} L_f^(i) * | s_v^(k) - s_u^(k) |
  double slack = 0.0;  // rhs - lhs
};

struct BoundReport {
  Variant variant = Variant::GIN;
  std::size_t layer = 0;
  double tolerance = 0.0;
  double lipschitz_product = 0.0;
  std::vector<BoundPair> pairs;       // all (v, u), v < u, lexicographic
  std::vector<BoundPair> violations;  // pairs with slack < -tolerance

  bool certified() const { return violations.empty(); }
  nlohmann::json to_json() const;
  std::string to_csv() const;  // v,u,lhs,rhs,slack
};

inline constexpr double kBoundSlackTol = 1e-8;

// Checks the representation-distance bound at layer k for every node pair:
// GIN (which must be epsilon = 0 with zero biases) against raw walk counts,
// GCN against normalized walk sums. The walk table must carry the matching
// statistic up to length k.
BoundReport verify_bound(const Graph& graph, const Model& model, std::size_t k,
                         const WalkTable& walks, double tol = kBoundSlackTol);

}  // namespace walkgnn
