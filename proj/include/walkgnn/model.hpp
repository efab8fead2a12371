#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "walkgnn/graph.hpp"
#include "walkgnn/matrix.hpp"

namespace walkgnn {

// The four aggregation schemes under study. One variant per model; mixed
// stacks are out of scope.
enum class Variant { GCN, DGCNN, GAT, GIN };

enum class BiasMode { Zero, RandomSmall };

enum class Nonlinearity { Identity, Relu, Tanh, Elu };

// What a GAT layer does with an isolated node, whose update equation sums
// over an empty N(v). Default is an error; ZeroRow emits an all-zeros row.
enum class IsolatedPolicy { Error, ZeroRow };

double apply_nonlinearity(Nonlinearity f, double x);

std::string to_string(Variant v);
Variant variant_from_string(std::string_view s);
std::string to_string(Nonlinearity f);
Nonlinearity nonlinearity_from_string(std::string_view s);

// One affine (or, with an empty bias, linear) map y = W x + b.
struct LinearLayer {
  DenseMatrix weight;        // out x in
  std::vector<double> bias;  // empty = no bias; else size out

  std::size_t in_dim() const { return weight.cols; }
  std::size_t out_dim() const { return weight.rows; }
  std::vector<double> apply(std::span<const double> x) const;

  bool operator==(const LinearLayer&) const = default;
};

// Fully-connected stack with ReLU after every layer, the last one included.
// With empty biases it is positively homogeneous: MLP(a x) = a MLP(x), a > 0.
struct MLPBlock {
  std::vector<LinearLayer> layers;

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }
  std::vector<double> apply(std::span<const double> x) const;

  bool operator==(const MLPBlock&) const = default;
};

// Architecture description; init_model materializes the weights.
struct ModelSpec {
  Variant variant = Variant::GIN;
  std::vector<std::size_t> widths;  // output width per layer; depth = widths.size()
  double epsilon = 0.0;             // GIN only
  BiasMode bias_mode = BiasMode::Zero;
  std::size_t mlp_layers = 2;       // sublayers per GIN MLP
  Nonlinearity dgcnn_f = Nonlinearity::Tanh;
  Nonlinearity gat_sigma = Nonlinearity::Elu;
  double gat_negative_slope = 0.2;
  IsolatedPolicy gat_isolated = IsolatedPolicy::Error;

  static ModelSpec uniform(Variant variant, std::size_t depth, std::size_t width);
  std::size_t depth() const { return widths.size(); }
};

// Materialized weights of one aggregation layer. Which members are populated
// depends on the variant: linear for GCN/DGCNN/GAT, mlp for GIN, attention
// (the score vector a, length 2*width) for GAT.
struct ModelLayer {
  LinearLayer linear;
  MLPBlock mlp;
  std::vector<double> attention;
  double epsilon = 0.0;

  bool operator==(const ModelLayer&) const = default;
};

struct Model {
  ModelSpec spec;
  std::uint64_t seed = 0;
  std::vector<ModelLayer> layers;

  std::size_t depth() const { return layers.size(); }

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);

  bool operator==(const Model& other) const {
    return seed == other.seed && layers == other.layers;
  }
};

// Weights are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)), drawn row-major
// from a single SplitMix64 stream seeded with `seed` (layer by layer: weight
// matrix, then bias, then attention vector). Biases exist only in GIN MLP
// sublayers and only in RandomSmall mode, where they are uniform in
// [-0.01, 0.01); GCN is strictly linear and DGCNN/GAT apply a bare weight.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

// Node representations per layer; layers[k] is H^(k), n x width_k. H^(0) is
// the all-ones column: every node starts from the same scalar feature 1.
struct EmbeddingTable {
  std::vector<DenseMatrix> layers;

  std::size_t depth() const { return layers.size() - 1; }
  const DenseMatrix& at(std::size_t k) const;
  std::string to_csv() const;  // node,layer,c0,c1,...
};

// The four update equations, one row per node, closed neighborhood visited
// in ascending index order.

// GCN: row v = ReLU( sum_{u in N+(v)} W h_u / sqrt((1+d(v)) (1+d(u))) ).
// The layer must be bias-free.
DenseMatrix gcn_layer(const Graph& graph, const DenseMatrix& h, const LinearLayer& layer);

// DGCNN: row v = f( sum_{u in N+(v)} W h_u / (d(v)+1) ).
DenseMatrix dgcnn_layer(const Graph& graph, const DenseMatrix& h, const LinearLayer& layer,
                        Nonlinearity f);

// Attention weights of node v over its neighbors (ascending), computed as a
// softmax of leaky-ReLU scores a . [W h_v || W h_u] and renormalized to sum
// to one. The proof of collapse needs only that normalization.
std::vector<double> gat_attention(const Graph& graph, const DenseMatrix& h, const DenseMatrix& w,
                                  std::span<const double> attention, double negative_slope,
                                  NodeId v);

// GAT: row v = sigma( sum_{u in N(v)} alpha_vu W h_u ). The sum runs over
// the open neighborhood, with no self term, so isolated nodes hit `policy`.
DenseMatrix gat_layer(const Graph& graph, const DenseMatrix& h, const DenseMatrix& w,
                      std::span<const double> attention, double negative_slope,
                      Nonlinearity sigma, IsolatedPolicy policy);

// GIN-eps: row v = MLP( (1+eps) h_v + sum_{u in N(v)} h_u ).
DenseMatrix gin_layer(const Graph& graph, const DenseMatrix& h, const MLPBlock& mlp,
                      double epsilon);

// Runs all layers from H^(0) = ones and keeps every intermediate table.
EmbeddingTable forward(const Graph& graph, const Model& model);

enum class ReadoutMode { Sum, Mean };

// Column-wise sum or mean of the final layer.
std::vector<double> readout(const EmbeddingTable& table, ReadoutMode mode);

}  // namespace walkgnn
