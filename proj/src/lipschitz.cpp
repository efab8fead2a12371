#include "walkgnn/lipschitz.hpp"

#include <cmath>
#include <sstream>

#include "walkgnn/format.hpp"
#include "walkgnn/rng.hpp"

namespace walkgnn {

namespace {

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// One power-iteration run from `start`; returns the Rayleigh estimate of the
// top singular value once successive estimates stagnate within tol.
SpectralNormResult power_iterate(const DenseMatrix& w, std::vector<double> start, double tol,
                                 std::size_t max_iter) {
  normalize(start);
  SpectralNormResult result;
  double estimate = norm2(matvec(w, start));
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::vector<double> next = matvec_transposed(w, matvec(w, start));
    const double next_norm = norm2(next);
    if (next_norm == 0.0) {
      // start lies in the null space; the estimate is already exact for it
      result.value = 0.0;
      result.residual = 0.0;
      result.iterations = iter;
      result.converged = true;
      return result;
    }
    for (double& x : next) x /= next_norm;
    const double next_estimate = norm2(matvec(w, next));
    const double residual = std::abs(next_estimate - estimate);
    start = std::move(next);
    estimate = next_estimate;
    result.residual = residual;
    if (residual <= tol * std::max(next_estimate, 1e-300)) {
      result.value = estimate;
      result.iterations = iter;
      result.converged = true;
      return result;
    }
  }
  result.value = estimate;
  result.iterations = max_iter;
  result.converged = false;
  return result;
}

}  // namespace

SpectralNormResult spectral_norm_detailed(const DenseMatrix& w, double tol,
                                          std::size_t max_iter) {
  if (w.rows == 0 || w.cols == 0) return {.value = 0.0, .converged = true};
  if (!w.all_finite()) throw UsageError("spectral_norm: matrix has non-finite entries");
  if (!(tol > 0.0)) throw UsageError("spectral_norm: tol must be > 0");

  SpectralNormResult first = power_iterate(w, std::vector<double>(w.cols, 1.0), tol, max_iter);

  // Perturbed restart: the all-ones start can sit exactly orthogonal to the
  // top singular space, in which case the first run stagnates on a smaller
  // singular value. The perturbation is drawn deterministically.
  SplitMix64 rng(0x9E3779B97F4A7C15ULL);
  std::vector<double> perturbed(w.cols);
  for (double& x : perturbed) x = 1.0 + rng.next_symmetric(0.5);
  SpectralNormResult second = power_iterate(w, std::move(perturbed), tol, max_iter);

  SpectralNormResult best = (second.value > first.value) ? second : first;
  best.iterations = first.iterations + second.iterations;
  best.converged = first.converged && second.converged;
  if (!best.converged) best.residual = std::max(first.residual, second.residual);
  return best;
}

double spectral_norm(const DenseMatrix& w, double tol, std::size_t max_iter) {
  const SpectralNormResult result = spectral_norm_detailed(w, tol, max_iter);
  if (!result.converged) {
    throw ConvergenceError(result.value, result.residual);
  }
  return result.value;
}

double layer_lipschitz(const LinearLayer& layer) { return spectral_norm(layer.weight); }

double layer_lipschitz(const MLPBlock& mlp) {
  double product = 1.0;
  for (const LinearLayer& layer : mlp.layers) product *= spectral_norm(layer.weight);
  return product;
}

LipschitzProfile lipschitz_profile(const Model& model) {
  LipschitzProfile profile;
  double product = 1.0;
  for (const ModelLayer& layer : model.layers) {
    double l = 0.0;
    switch (model.spec.variant) {
      case Variant::GCN:
      case Variant::DGCNN:
      case Variant::GAT:
        l = layer_lipschitz(layer.linear);
        break;
      case Variant::GIN:
        l = layer_lipschitz(layer.mlp);
        break;
    }
    product *= l;
    profile.per_layer.push_back(l);
    profile.cumulative.push_back(product);
  }
  return profile;
}

nlohmann::json LipschitzProfile::to_json() const {
  return {{"per_layer", per_layer}, {"cumulative", cumulative}};
}

std::string LipschitzProfile::to_csv() const {
  std::ostringstream out;
  out << "layer,lipschitz,cumulative\n";
  for (std::size_t i = 0; i < per_layer.size(); ++i) {
    out << (i + 1) << "," << format_double(per_layer[i]) << "," << format_double(cumulative[i])
        << "\n";
  }
  return out.str();
}

BoundReport verify_bound(const Graph& graph, const Model& model, std::size_t k,
                         const WalkTable& walks, double tol) {
  if (k == 0 || k > model.depth()) throw UsageError("verify_bound: layer index out of range");
  if (walks.max_length < k) throw UsageError("verify_bound: walk table too short");

  bool raw = false;
  switch (model.spec.variant) {
    case Variant::GIN:
      for (const ModelLayer& layer : model.layers) {
        if (layer.epsilon != 0.0)
          throw UsageError("verify_bound: the walk-count bound holds for GIN-0 (epsilon = 0)");
        for (const LinearLayer& sub : layer.mlp.layers) {
          if (!sub.bias.empty())
            throw UsageError("verify_bound: the walk-count bound assumes zero biases");
        }
      }
      raw = true;
      break;
    case Variant::GCN:
      raw = false;
      break;
    default:
      throw UsageError(
          "verify_bound: walk-distance bounds are defined for GIN-0 and GCN only; DGCNN/GAT "
          "collapse instead");
  }
  if (raw && !walks.has_raw())
    throw UsageError("verify_bound: GIN-0 needs raw walk counts, table has none");
  if (!raw && !walks.has_normalized())
    throw UsageError("verify_bound: GCN needs normalized walk sums, table has none");

  const EmbeddingTable table = forward(graph, model);
  const DenseMatrix& h = table.at(k);
  const LipschitzProfile profile = lipschitz_profile(model);
  const double product = profile.cumulative[k - 1];

  BoundReport report;
  report.variant = model.spec.variant;
  report.layer = k;
  report.tolerance = tol;
  report.lipschitz_product = product;

  const std::size_t n = graph.node_count();
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = v + 1; u < n; ++u) {
      BoundPair pair;
      pair.v = v;
      pair.u = u;
      pair.lhs = euclidean_distance(h.row(v), h.row(u));
      const double sv = raw ? static_cast<double>(walks.counts[v][k]) : walks.normalized[v][k];
      const double su = raw ? static_cast<double>(walks.counts[u][k]) : walks.normalized[u][k];
      // || s_v - s_u ||_2 over a scalar statistic is an absolute difference
      pair.rhs = product * std::abs(sv - su);
      pair.slack = pair.rhs - pair.lhs;
      if (pair.slack < -tol) report.violations.push_back(pair);
      report.pairs.push_back(pair);
    }
  }
  return report;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json violation_array = nlohmann::json::array();
  for (const BoundPair& p : violations) {
    violation_array.push_back(
        {{"v", p.v}, {"u", p.u}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"slack", p.slack}});
  }
  double worst = 0.0;
  for (const BoundPair& p : pairs) worst = std::min(worst, p.slack);
  return {{"variant", to_string(variant)},
          {"layer", layer},
          {"tolerance", tolerance},
          {"lipschitz_product", lipschitz_product},
          {"pair_count", pairs.size()},
          {"min_slack", worst},
          {"violations", violation_array},
          {"certified", certified()}};
}

std::string BoundReport::to_csv() const {
  std::ostringstream out;
  out << "v,u,lhs,rhs,slack\n";
  for (const BoundPair& p : pairs) {
    out << p.v << "," << p.u << "," << format_double(p.lhs) << "," << format_double(p.rhs) << ","
        << format_double(p.slack) << "\n";
  }
  return out.str();
}

}  // namespace walkgnn
