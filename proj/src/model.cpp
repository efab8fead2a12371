#include "walkgnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "walkgnn/format.hpp"
#include "walkgnn/rng.hpp"

namespace walkgnn {

double apply_nonlinearity(Nonlinearity f, double x) {
  switch (f) {
    case Nonlinearity::Identity: return x;
    case Nonlinearity::Relu: return x > 0.0 ? x : 0.0;
    case Nonlinearity::Tanh: return std::tanh(x);
    case Nonlinearity::Elu: return x >= 0.0 ? x : std::expm1(x);
  }
  return x;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::GCN: return "gcn";
    case Variant::DGCNN: return "dgcnn";
    case Variant::GAT: return "gat";
    case Variant::GIN: return "gin";
  }
  return "";
}

Variant variant_from_string(std::string_view s) {
  if (s == "gcn") return Variant::GCN;
  if (s == "dgcnn") return Variant::DGCNN;
  if (s == "gat") return Variant::GAT;
  if (s == "gin" || s == "gin0") return Variant::GIN;
  throw UsageError("unknown model variant \"" + std::string(s) + "\"");
}

std::string to_string(Nonlinearity f) {
  switch (f) {
    case Nonlinearity::Identity: return "identity";
    case Nonlinearity::Relu: return "relu";
    case Nonlinearity::Tanh: return "tanh";
    case Nonlinearity::Elu: return "elu";
  }
  return "";
}

Nonlinearity nonlinearity_from_string(std::string_view s) {
  if (s == "identity") return Nonlinearity::Identity;
  if (s == "relu") return Nonlinearity::Relu;
  if (s == "tanh") return Nonlinearity::Tanh;
  if (s == "elu") return Nonlinearity::Elu;
  throw UsageError("unknown nonlinearity \"" + std::string(s) + "\"");
}

std::vector<double> LinearLayer::apply(std::span<const double> x) const {
  std::vector<double> y = matvec(weight, x);
  if (!bias.empty()) {
    if (bias.size() != y.size()) throw DimensionError("bias size does not match out dim");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
  }
  return y;
}

std::vector<double> MLPBlock::apply(std::span<const double> x) const {
  if (layers.empty()) throw DimensionError("empty MLP");
  std::vector<double> h(x.begin(), x.end());
  for (const LinearLayer& layer : layers) {
    h = layer.apply(h);
    for (double& v : h) v = v > 0.0 ? v : 0.0;
  }
  return h;
}

ModelSpec ModelSpec::uniform(Variant variant, std::size_t depth, std::size_t width) {
  ModelSpec spec;
  spec.variant = variant;
  spec.widths.assign(depth, width);
  return spec;
}

namespace {

DenseMatrix draw_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& e : m.entries) e = rng.next_symmetric(scale);
  return m;
}

std::vector<double> draw_bias(SplitMix64& rng, std::size_t size, BiasMode mode) {
  if (mode == BiasMode::Zero) return {};
  std::vector<double> b(size);
  for (double& e : b) e = rng.next_symmetric(0.01);
  return b;
}

}  // namespace

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
  for (std::size_t w : spec.widths)
    if (w == 0) throw ConstructionError("layer widths must be >= 1");
  if (!std::isfinite(spec.epsilon)) throw ConstructionError("epsilon must be finite");
  if (spec.mlp_layers == 0) throw ConstructionError("GIN MLPs need at least one sublayer");

  Model model;
  model.spec = spec;
  model.seed = seed;
  SplitMix64 rng(seed);
  std::size_t in = 1;  // h^(0) is the scalar feature 1
  for (std::size_t k = 0; k < spec.widths.size(); ++k) {
    const std::size_t out = spec.widths[k];
    ModelLayer layer;
    switch (spec.variant) {
      case Variant::GCN:
      case Variant::DGCNN:
        layer.linear.weight = draw_matrix(rng, out, in);
        break;
      case Variant::GAT: {
        layer.linear.weight = draw_matrix(rng, out, in);
        layer.attention.resize(2 * out);
        const double scale = 1.0 / std::sqrt(static_cast<double>(2 * out));
        for (double& e : layer.attention) e = rng.next_symmetric(scale);
        break;
      }
      case Variant::GIN: {
        layer.epsilon = spec.epsilon;
        std::size_t sub_in = in;
        for (std::size_t s = 0; s < spec.mlp_layers; ++s) {
          LinearLayer sub;
          sub.weight = draw_matrix(rng, out, sub_in);
          sub.bias = draw_bias(rng, out, spec.bias_mode);
          layer.mlp.layers.push_back(std::move(sub));
          sub_in = out;
        }
        break;
      }
    }
    model.layers.push_back(std::move(layer));
    in = out;
  }
  return model;
}

const DenseMatrix& EmbeddingTable::at(std::size_t k) const {
  if (k >= layers.size()) throw UsageError("embedding layer index out of range");
  return layers[k];
}

std::string EmbeddingTable::to_csv() const {
  std::size_t max_width = 0;
  for (const DenseMatrix& h : layers) max_width = std::max(max_width, h.cols);
  std::ostringstream out;
  out << "node,layer";
  for (std::size_t c = 0; c < max_width; ++c) out << ",c" << c;
  out << "\n";
  const std::size_t n = layers.empty() ? 0 : layers[0].rows;
  for (NodeId v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      out << v << "," << k;
      for (std::size_t c = 0; c < max_width; ++c) {
        out << ",";
        if (c < layers[k].cols) out << format_double(layers[k](v, c));
      }
      out << "\n";
    }
  }
  return out.str();
}

namespace {

void check_input(const Graph& graph, const DenseMatrix& h, std::size_t in_dim,
                 const char* what) {
  if (h.rows != graph.node_count())
    throw DimensionError(std::string(what) + ": H has " + std::to_string(h.rows) +
                         " rows for a graph of " + std::to_string(graph.node_count()) +
                         " nodes");
  if (h.cols != in_dim)
    throw DimensionError(std::string(what) + ": H width " + std::to_string(h.cols) +
                         " does not match layer input dim " + std::to_string(in_dim));
}

}  // namespace

DenseMatrix gcn_layer(const Graph& graph, const DenseMatrix& h, const LinearLayer& layer) {
  check_input(graph, h, layer.in_dim(), "gcn_layer");
  if (!layer.bias.empty())
    throw UsageError("gcn_layer: GCN applies a linear, not affine, transformation");
  const std::size_t n = graph.node_count();
  DenseMatrix out(n, layer.out_dim());
  for (NodeId v = 0; v < n; ++v) {
    const double dv = static_cast<double>(graph.degree(v));
    std::vector<double> acc(layer.out_dim(), 0.0);
    graph.for_each_closed_neighbor(v, [&](NodeId u) {
      const double du = static_cast<double>(graph.degree(u));
      const std::vector<double> wh = matvec(layer.weight, h.row(u));
      axpy(1.0 / std::sqrt((1.0 + dv) * (1.0 + du)), wh, acc);
    });
    for (std::size_t c = 0; c < acc.size(); ++c) out(v, c) = acc[c] > 0.0 ? acc[c] : 0.0;
  }
  return out;
}

DenseMatrix dgcnn_layer(const Graph& graph, const DenseMatrix& h, const LinearLayer& layer,
                        Nonlinearity f) {
  check_input(graph, h, layer.in_dim(), "dgcnn_layer");
  const std::size_t n = graph.node_count();
  DenseMatrix out(n, layer.out_dim());
  for (NodeId v = 0; v < n; ++v) {
    const double inv = 1.0 / (static_cast<double>(graph.degree(v)) + 1.0);
    std::vector<double> acc(layer.out_dim(), 0.0);
    graph.for_each_closed_neighbor(v, [&](NodeId u) {
      const std::vector<double> wh = layer.apply(h.row(u));
      axpy(inv, wh, acc);
    });
    for (std::size_t c = 0; c < acc.size(); ++c) out(v, c) = apply_nonlinearity(f, acc[c]);
  }
  return out;
}

std::vector<double> gat_attention(const Graph& graph, const DenseMatrix& h, const DenseMatrix& w,
                                  std::span<const double> attention, double negative_slope,
                                  NodeId v) {
  if (graph.degree(v) == 0) throw IsolatedNodeError(v);
  if (attention.size() != 2 * w.rows)
    throw DimensionError("gat_attention: score vector must have length 2*out");
  const std::vector<double> wh_v = matvec(w, h.row(v));
  const std::span<const double> a_self = attention.subspan(0, w.rows);
  const std::span<const double> a_nbr = attention.subspan(w.rows, w.rows);
  const double self_score = dot(a_self, wh_v);

  std::vector<double> scores;
  scores.reserve(graph.degree(v));
  for (NodeId u : graph.neighbors(v)) {
    const std::vector<double> wh_u = matvec(w, h.row(u));
    const double raw = self_score + dot(a_nbr, wh_u);
    scores.push_back(raw > 0.0 ? raw : negative_slope * raw);
  }
  const double max_score = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max_score);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

DenseMatrix gat_layer(const Graph& graph, const DenseMatrix& h, const DenseMatrix& w,
                      std::span<const double> attention, double negative_slope,
                      Nonlinearity sigma, IsolatedPolicy policy) {
  check_input(graph, h, w.cols, "gat_layer");
  const std::size_t n = graph.node_count();
  DenseMatrix out(n, w.rows);
  for (NodeId v = 0; v < n; ++v) {
    if (graph.degree(v) == 0) {
      if (policy == IsolatedPolicy::Error) throw IsolatedNodeError(v);
      continue;  // ZeroRow: leave the zeros in place
    }
    const std::vector<double> alpha = gat_attention(graph, h, w, attention, negative_slope, v);
    std::vector<double> acc(w.rows, 0.0);
    std::size_t i = 0;
    for (NodeId u : graph.neighbors(v)) {
      const std::vector<double> wh = matvec(w, h.row(u));
      axpy(alpha[i++], wh, acc);
    }
    for (std::size_t c = 0; c < acc.size(); ++c) out(v, c) = apply_nonlinearity(sigma, acc[c]);
  }
  return out;
}

DenseMatrix gin_layer(const Graph& graph, const DenseMatrix& h, const MLPBlock& mlp,
                      double epsilon) {
  check_input(graph, h, mlp.in_dim(), "gin_layer");
  const std::size_t n = graph.node_count();
  DenseMatrix out(n, mlp.out_dim());
  for (NodeId v = 0; v < n; ++v) {
    std::vector<double> agg(h.cols, 0.0);
    axpy(1.0 + epsilon, h.row(v), agg);
    for (NodeId u : graph.neighbors(v)) axpy(1.0, h.row(u), agg);
    const std::vector<double> row = mlp.apply(agg);
    std::copy(row.begin(), row.end(), out.row(v).begin());
  }
  return out;
}

EmbeddingTable forward(const Graph& graph, const Model& model) {
  EmbeddingTable table;
  table.layers.push_back(DenseMatrix(graph.node_count(), 1, 1.0));
  for (const ModelLayer& layer : model.layers) {
    const DenseMatrix& h = table.layers.back();
    switch (model.spec.variant) {
      case Variant::GCN:
        table.layers.push_back(gcn_layer(graph, h, layer.linear));
        break;
      case Variant::DGCNN:
        table.layers.push_back(dgcnn_layer(graph, h, layer.linear, model.spec.dgcnn_f));
        break;
      case Variant::GAT:
        table.layers.push_back(gat_layer(graph, h, layer.linear.weight, layer.attention,
                                         model.spec.gat_negative_slope, model.spec.gat_sigma,
                                         model.spec.gat_isolated));
        break;
      case Variant::GIN:
        table.layers.push_back(gin_layer(graph, h, layer.mlp, layer.epsilon));
        break;
    }
  }
  return table;
}

std::vector<double> readout(const EmbeddingTable& table, ReadoutMode mode) {
  if (table.layers.empty()) throw UsageError("readout: empty embedding table");
  const DenseMatrix& h = table.layers.back();
  if (mode == ReadoutMode::Mean && h.rows == 0)
    throw UsageError("readout: mean of an empty graph");
  std::vector<double> result(h.cols, 0.0);
  for (std::size_t v = 0; v < h.rows; ++v) axpy(1.0, h.row(v), result);
  if (mode == ReadoutMode::Mean) {
    for (double& x : result) x /= static_cast<double>(h.rows);
  }
  return result;
}

namespace {

nlohmann::json linear_to_json(const LinearLayer& layer) {
  nlohmann::json j{{"rows", layer.weight.rows},
                   {"cols", layer.weight.cols},
                   {"weight", layer.weight.entries}};
  if (!layer.bias.empty()) j["bias"] = layer.bias;
  return j;
}

LinearLayer linear_from_json(const nlohmann::json& j) {
  LinearLayer layer;
  layer.weight.rows = j.at("rows").get<std::size_t>();
  layer.weight.cols = j.at("cols").get<std::size_t>();
  layer.weight.entries = j.at("weight").get<std::vector<double>>();
  if (layer.weight.entries.size() != layer.weight.rows * layer.weight.cols)
    throw FormatError("model json: weight entry count does not match dims");
  if (j.contains("bias")) layer.bias = j.at("bias").get<std::vector<double>>();
  return layer;
}

}  // namespace

nlohmann::json Model::to_json() const {
  nlohmann::json layer_array = nlohmann::json::array();
  for (const ModelLayer& layer : layers) {
    nlohmann::json j;
    switch (spec.variant) {
      case Variant::GCN:
      case Variant::DGCNN:
        j["linear"] = linear_to_json(layer.linear);
        break;
      case Variant::GAT:
        j["linear"] = linear_to_json(layer.linear);
        j["attention"] = layer.attention;
        break;
      case Variant::GIN: {
        nlohmann::json mlp = nlohmann::json::array();
        for (const LinearLayer& sub : layer.mlp.layers) mlp.push_back(linear_to_json(sub));
        j["mlp"] = std::move(mlp);
        j["epsilon"] = layer.epsilon;
        break;
      }
    }
    layer_array.push_back(std::move(j));
  }
  return {{"variant", to_string(spec.variant)},
          {"widths", spec.widths},
          {"epsilon", spec.epsilon},
          {"bias_mode", spec.bias_mode == BiasMode::Zero ? "zero" : "random-small"},
          {"mlp_layers", spec.mlp_layers},
          {"dgcnn_f", to_string(spec.dgcnn_f)},
          {"gat_sigma", to_string(spec.gat_sigma)},
          {"gat_negative_slope", spec.gat_negative_slope},
          {"seed", seed},
          {"layers", layer_array}};
}

Model Model::from_json(const nlohmann::json& j) {
  Model model;
  model.spec.variant = variant_from_string(j.at("variant").get<std::string>());
  model.spec.widths = j.at("widths").get<std::vector<std::size_t>>();
  model.spec.epsilon = j.at("epsilon").get<double>();
  model.spec.bias_mode =
      j.at("bias_mode").get<std::string>() == "zero" ? BiasMode::Zero : BiasMode::RandomSmall;
  model.spec.mlp_layers = j.at("mlp_layers").get<std::size_t>();
  model.spec.dgcnn_f = nonlinearity_from_string(j.at("dgcnn_f").get<std::string>());
  model.spec.gat_sigma = nonlinearity_from_string(j.at("gat_sigma").get<std::string>());
  model.spec.gat_negative_slope = j.at("gat_negative_slope").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& lj : j.at("layers")) {
    ModelLayer layer;
    switch (model.spec.variant) {
      case Variant::GCN:
      case Variant::DGCNN:
        layer.linear = linear_from_json(lj.at("linear"));
        break;
      case Variant::GAT:
        layer.linear = linear_from_json(lj.at("linear"));
        layer.attention = lj.at("attention").get<std::vector<double>>();
        break;
      case Variant::GIN:
        for (const auto& sub : lj.at("mlp")) layer.mlp.layers.push_back(linear_from_json(sub));
        layer.epsilon = lj.at("epsilon").get<double>();
        break;
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

}  // namespace walkgnn
