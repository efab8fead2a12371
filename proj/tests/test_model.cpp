#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "walkgnn/model.hpp"
#include "walkgnn/rng.hpp"
#include "walkgnn/walks.hpp"

using namespace walkgnn;

namespace {

DenseMatrix ones_column(std::size_t n) { return DenseMatrix(n, 1, 1.0); }

LinearLayer scalar_weight(double w) {
  LinearLayer layer;
  layer.weight = DenseMatrix(1, 1);
  layer.weight(0, 0) = w;
  return layer;
}

double max_pairwise_row_distance(const DenseMatrix& h) {
  double worst = 0.0;
  for (std::size_t v = 0; v < h.rows; ++v)
    for (std::size_t u = v + 1; u < h.rows; ++u)
      worst = std::max(worst, euclidean_distance(h.row(v), h.row(u)));
  return worst;
}

// Relabels g by permutation perm (new id = perm[old id]).
Graph relabel(const Graph& g, const std::vector<NodeId>& perm) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
  return Graph(g.node_count(), edges);
}

}  // namespace

TEST_CASE("init_model is deterministic and seed-sensitive") {
  const ModelSpec spec = ModelSpec::uniform(Variant::GIN, 3, 8);
  const Model a = init_model(spec, 42);
  const Model b = init_model(spec, 42);
  CHECK(a == b);
  const Model c = init_model(spec, 43);
  CHECK_FALSE(a == c);
}

TEST_CASE("zero bias mode leaves every bias empty; random-small fills them") {
  ModelSpec spec = ModelSpec::uniform(Variant::GIN, 2, 4);
  const Model zero = init_model(spec, 1);
  for (const ModelLayer& layer : zero.layers)
    for (const LinearLayer& sub : layer.mlp.layers) CHECK(sub.bias.empty());

  spec.bias_mode = BiasMode::RandomSmall;
  const Model biased = init_model(spec, 1);
  for (const ModelLayer& layer : biased.layers) {
    for (const LinearLayer& sub : layer.mlp.layers) {
      REQUIRE(sub.bias.size() == sub.out_dim());
      for (double b : sub.bias) CHECK(std::abs(b) <= 0.01);
    }
  }
}

TEST_CASE("model json round-trip is exact") {
  for (const Variant variant : {Variant::GCN, Variant::DGCNN, Variant::GAT, Variant::GIN}) {
    ModelSpec spec = ModelSpec::uniform(variant, 2, 3);
    if (variant == Variant::GIN) spec.bias_mode = BiasMode::RandomSmall;
    const Model m = init_model(spec, 77);
    CHECK(Model::from_json(m.to_json()) == m);
  }
}

TEST_CASE("gcn layer with identity weight reproduces normalized walk sums") {
  const Graph g = parse_edge_list("0 1\n1 2");
  const DenseMatrix out = gcn_layer(g, ones_column(3), scalar_weight(1.0));
  const WalkTable t = normalized_walk_sums(g, 1);
  for (NodeId v = 0; v < 3; ++v)
    CHECK(out(v, 0) == doctest::Approx(t.normalized[v][1]).epsilon(1e-14));
}

TEST_CASE("gcn layer is constant on regular graphs") {
  const Graph c4 = generate({.kind = SyntheticKind::Cycle, .n = 4});
  const DenseMatrix out = gcn_layer(c4, ones_column(4), scalar_weight(2.5));
  for (NodeId v = 0; v < 4; ++v) CHECK(out(v, 0) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("gcn layer refuses a bias") {
  LinearLayer layer = scalar_weight(1.0);
  layer.bias = {0.1};
  CHECK_THROWS_AS(gcn_layer(parse_edge_list("0 1"), ones_column(2), layer), UsageError);
}

TEST_CASE("dgcnn layer maps equal rows to equal rows") {
  const Graph g = generate({.kind = SyntheticKind::ErdosRenyi,
                            .n = 10,
                            .edge_probability = 0.4,
                            .seed = 2});
  DenseMatrix h(10, 3);
  for (std::size_t v = 0; v < 10; ++v)
    for (std::size_t c = 0; c < 3; ++c) h(v, c) = 0.3 * static_cast<double>(c) - 0.1;
  LinearLayer layer;
  layer.weight = DenseMatrix(2, 3);
  std::iota(layer.weight.entries.begin(), layer.weight.entries.end(), -2.0);
  const DenseMatrix out = dgcnn_layer(g, h, layer, Nonlinearity::Tanh);
  CHECK(max_pairwise_row_distance(out) <= 1e-14);
}

TEST_CASE("dgcnn layer with unit weight and ones input gives tanh(1) everywhere") {
  const Graph g = parse_edge_list("0 1\n0 2\n0 3\n2 3");
  const DenseMatrix out = dgcnn_layer(g, ones_column(4), scalar_weight(1.0), Nonlinearity::Tanh);
  for (NodeId v = 0; v < 4; ++v)
    CHECK(out(v, 0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("dgcnn collapses star(3) after 3 random layers") {
  const Graph g = generate({.kind = SyntheticKind::Star, .n = 3});
  const Model m = init_model(ModelSpec::uniform(Variant::DGCNN, 3, 8), 11);
  const EmbeddingTable table = forward(g, m);
  CHECK(max_pairwise_row_distance(table.at(3)) <= 1e-12);
}

TEST_CASE("gat attention: equal rows give uniform weights") {
  const Graph star = generate({.kind = SyntheticKind::Star, .n = 4});
  DenseMatrix w(2, 1);
  w(0, 0) = 0.7;
  w(1, 0) = -0.3;
  const std::vector<double> a{0.5, -0.2, 0.1, 0.4};
  const std::vector<double> alpha = gat_attention(star, ones_column(5), w, a, 0.2, 0);
  REQUIRE(alpha.size() == 4);
  double total = 0.0;
  for (double x : alpha) {
    CHECK(x == doctest::Approx(0.25).epsilon(1e-14));
    total += x;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gat attention sums to 1 for arbitrary inputs") {
  const Graph g = generate({.kind = SyntheticKind::ErdosRenyi,
                            .n = 12,
                            .edge_probability = 0.5,
                            .seed = 6});
  SplitMix64 rng(1);
  DenseMatrix h(12, 3);
  for (double& x : h.entries) x = rng.next_symmetric(2.0);
  DenseMatrix w(2, 3);
  for (double& x : w.entries) x = rng.next_symmetric(1.0);
  std::vector<double> a(4);
  for (double& x : a) x = rng.next_symmetric(1.0);
  for (NodeId v = 0; v < 12; ++v) {
    if (g.degree(v) == 0) continue;
    const std::vector<double> alpha = gat_attention(g, h, w, a, 0.2, v);
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (double x : alpha) CHECK(x >= 0.0);
  }
}

TEST_CASE("gat attention on P3 center with equal rows is [1/2, 1/2]") {
  const Graph g = parse_edge_list("0 1\n1 2");
  DenseMatrix w(1, 1);
  w(0, 0) = 1.3;
  const std::vector<double> a{0.4, -0.9};
  const std::vector<double> alpha = gat_attention(g, ones_column(3), w, a, 0.2, 1);
  REQUIRE(alpha.size() == 2);
  CHECK(alpha[0] == 0.5);
  CHECK(alpha[1] == 0.5);
}

TEST_CASE("gat layer: scalar identity case is a convex combination") {
  // W = [2], sigma = identity, ones input: every row is exactly 2.
  const Graph g = parse_edge_list("0 1\n1 2\n2 0\n2 3");
  DenseMatrix w(1, 1);
  w(0, 0) = 2.0;
  const std::vector<double> a{0.3, 0.8};
  const DenseMatrix out =
      gat_layer(g, ones_column(4), w, a, 0.2, Nonlinearity::Identity, IsolatedPolicy::Error);
  for (NodeId v = 0; v < 4; ++v) CHECK(out(v, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gat collapses C5 after 4 random layers") {
  const Graph g = generate({.kind = SyntheticKind::Cycle, .n = 5});
  const Model m = init_model(ModelSpec::uniform(Variant::GAT, 4, 8), 23);
  const EmbeddingTable table = forward(g, m);
  CHECK(max_pairwise_row_distance(table.at(4)) <= 1e-12);
}

TEST_CASE("gat isolated-node policies") {
  const Graph g = parse_edge_list("0 1", 3);  // node 2 isolated
  DenseMatrix w(1, 1);
  w(0, 0) = 1.0;
  const std::vector<double> a{1.0, 1.0};
  CHECK_THROWS_AS(
      gat_layer(g, ones_column(3), w, a, 0.2, Nonlinearity::Elu, IsolatedPolicy::Error),
      IsolatedNodeError);
  CHECK_THROWS_AS(gat_attention(g, ones_column(3), w, a, 0.2, 2), IsolatedNodeError);
  const DenseMatrix out =
      gat_layer(g, ones_column(3), w, a, 0.2, Nonlinearity::Elu, IsolatedPolicy::ZeroRow);
  CHECK(out(2, 0) == 0.0);
  CHECK(out(0, 0) > 0.0);
}

TEST_CASE("gin layer with identity MLP yields d(v) + 1 on ones") {
  const Graph g = parse_edge_list("0 1\n1 2\n2 3\n3 0\n0 2");
  MLPBlock mlp;
  mlp.layers.push_back(scalar_weight(1.0));
  const DenseMatrix out = gin_layer(g, ones_column(4), mlp, 0.0);
  for (NodeId v = 0; v < 4; ++v)
    CHECK(out(v, 0) == doctest::Approx(static_cast<double>(g.degree(v) + 1)));
}

TEST_CASE("two stacked scalar GIN-0 layers on K3 give 9 * product of weights") {
  // Hand-computed through positive homogeneity: each node of K3 aggregates 3
  // at the first layer and 3 * (3 w1 w2) at the second.
  const Graph k3 = parse_edge_list("0 1\n1 2\n2 0");
  const double w1 = 0.7, w2 = 1.3, w3 = 0.4, w4 = 2.1;
  MLPBlock mlp1, mlp2;
  mlp1.layers = {scalar_weight(w1), scalar_weight(w2)};
  mlp2.layers = {scalar_weight(w3), scalar_weight(w4)};
  const DenseMatrix h1 = gin_layer(k3, ones_column(3), mlp1, 0.0);
  const DenseMatrix h2 = gin_layer(k3, h1, mlp2, 0.0);
  for (NodeId v = 0; v < 3; ++v)
    CHECK(h2(v, 0) == doctest::Approx(9.0 * w1 * w2 * w3 * w4).epsilon(1e-14));
}

TEST_CASE("gin epsilon scales the self term") {
  const Graph p2 = parse_edge_list("0 1");
  MLPBlock mlp;
  mlp.layers.push_back(scalar_weight(1.0));
  const DenseMatrix out = gin_layer(p2, ones_column(2), mlp, 0.5);
  CHECK(out(0, 0) == doctest::Approx(2.5));  // (1 + 0.5) * 1 + 1
}

TEST_CASE("a depth-0 model leaves just the ones column") {
  const Graph g = parse_edge_list("0 1\n1 2\n2 3");
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 0, 8), 0);
  const EmbeddingTable table = forward(g, m);
  CHECK(table.depth() == 0);
  REQUIRE(table.layers.size() == 1);
  for (double x : table.at(0).entries) CHECK(x == 1.0);
  const std::vector<double> sum = readout(table, ReadoutMode::Sum);
  CHECK(sum[0] == 4.0);
}

TEST_CASE("forward keeps every layer and starts from ones") {
  const Graph g = generate({.kind = SyntheticKind::ErdosRenyi,
                            .n = 9,
                            .edge_probability = 0.35,
                            .seed = 14});
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 3, 5), 3);
  const EmbeddingTable table = forward(g, m);
  REQUIRE(table.layers.size() == 4);
  CHECK(table.at(0).cols == 1);
  for (double x : table.at(0).entries) CHECK(x == 1.0);
  CHECK(table.at(3).cols == 5);
  for (const DenseMatrix& h : table.layers) CHECK(h.all_finite());
}

TEST_CASE("GIN-0 zero-bias embeddings are proportional to walk counts") {
  const Graph p4 = parse_edge_list("0 1\n1 2\n2 3");
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 2, 8), 5);
  const EmbeddingTable table = forward(p4, m);
  const WalkTable walks = walk_counts(p4, 2);
  const DenseMatrix& h = table.at(2);
  for (NodeId v = 0; v < 4; ++v) {
    for (NodeId u = 0; u < 4; ++u) {
      const double wv = static_cast<double>(walks.counts[v][2]);
      const double wu = static_cast<double>(walks.counts[u][2]);
      for (std::size_t c = 0; c < h.cols; ++c) {
        const double lhs = h(v, c) * wu;
        const double rhs = h(u, c) * wv;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
      }
    }
  }
}

TEST_CASE("GCN embeddings are proportional to normalized walk sums") {
  const Graph g = generate({.kind = SyntheticKind::ErdosRenyi,
                            .n = 11,
                            .edge_probability = 0.3,
                            .seed = 21});
  const Model m = init_model(ModelSpec::uniform(Variant::GCN, 3, 6), 9);
  const EmbeddingTable table = forward(g, m);
  const WalkTable walks = normalized_walk_sums(g, 3);
  for (std::size_t k = 1; k <= 3; ++k) {
    const DenseMatrix& h = table.at(k);
    for (NodeId v = 0; v < h.rows; ++v) {
      for (NodeId u = v + 1; u < h.rows; ++u) {
        for (std::size_t c = 0; c < h.cols; ++c) {
          const double lhs = h(v, c) * walks.normalized[u][k];
          const double rhs = h(u, c) * walks.normalized[v][k];
          CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
        }
      }
    }
  }
}

TEST_CASE("readout: sum and mean over identical rows") {
  EmbeddingTable table;
  DenseMatrix h(5, 2);
  for (std::size_t v = 0; v < 5; ++v) {
    h(v, 0) = 1.5;
    h(v, 1) = -0.25;
  }
  table.layers.push_back(h);
  const std::vector<double> sum = readout(table, ReadoutMode::Sum);
  CHECK(sum[0] == doctest::Approx(7.5));
  CHECK(sum[1] == doctest::Approx(-1.25));
  const std::vector<double> mean = readout(table, ReadoutMode::Mean);
  CHECK(mean[0] == doctest::Approx(1.5));
  CHECK(mean[1] == doctest::Approx(-0.25));
}

TEST_CASE("DGCNN sum readout counts nodes: size 6 gives twice size 3") {
  const Model m = init_model(ModelSpec::uniform(Variant::DGCNN, 3, 8), 31);
  const Graph g3 = generate({.kind = SyntheticKind::Path, .n = 3});
  const Graph g6 = generate({.kind = SyntheticKind::ErdosRenyi,
                             .n = 6,
                             .edge_probability = 0.5,
                             .seed = 4});
  const std::vector<double> r3 = readout(forward(g3, m), ReadoutMode::Sum);
  const std::vector<double> r6 = readout(forward(g6, m), ReadoutMode::Sum);
  REQUIRE(r3.size() == r6.size());
  for (std::size_t c = 0; c < r3.size(); ++c)
    CHECK(r6[c] == doctest::Approx(2.0 * r3[c]).epsilon(1e-12));
}

TEST_CASE("all four variants are permutation equivariant") {
  const Graph g = generate({.kind = SyntheticKind::ErdosRenyi,
                            .n = 8,
                            .edge_probability = 0.5,
                            .seed = 12});
  REQUIRE(g.min_degree() >= 1);  // seed chosen so GAT is defined
  std::vector<NodeId> perm{3, 6, 0, 7, 2, 5, 1, 4};
  const Graph gp = relabel(g, perm);
  for (const Variant variant : {Variant::GCN, Variant::DGCNN, Variant::GAT, Variant::GIN}) {
    const Model m = init_model(ModelSpec::uniform(variant, 3, 4), 8);
    const EmbeddingTable a = forward(g, m);
    const EmbeddingTable b = forward(gp, m);
    for (std::size_t k = 0; k <= 3; ++k) {
      for (NodeId v = 0; v < 8; ++v) {
        CHECK(euclidean_distance(a.at(k).row(v), b.at(k).row(perm[v])) <=
              1e-10 * (1.0 + norm2(a.at(k).row(v))));
      }
    }
  }
}

TEST_CASE("zero-bias MLPs are positively homogeneous") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t in = 1 + rng.next_u64() % 6;
    const std::size_t width = 1 + rng.next_u64() % 8;
    Model m = init_model(ModelSpec::uniform(Variant::GIN, 1, width), rng.next_u64());
    MLPBlock mlp = m.layers[0].mlp;
    mlp.layers[0].weight = DenseMatrix(width, in);
    for (double& x : mlp.layers[0].weight.entries) x = rng.next_symmetric(1.0);

    std::vector<double> x(in);
    for (double& e : x) e = rng.next_symmetric(3.0);
    const double a = std::exp(rng.next_symmetric(3.0));

    std::vector<double> ax = x;
    for (double& e : ax) e *= a;
    const std::vector<double> lhs = mlp.apply(ax);
    std::vector<double> rhs = mlp.apply(x);
    for (double& e : rhs) e *= a;
    CHECK(euclidean_distance(lhs, rhs) <= 1e-12 * (1.0 + std::max(norm2(lhs), norm2(rhs))));
  }
}

TEST_CASE("zero-bias MLPs are additive over proportional vectors") {
  SplitMix64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 1 + rng.next_u64() % 5;
    const Model m = init_model(ModelSpec::uniform(Variant::GIN, 1, 6), rng.next_u64());
    MLPBlock mlp = m.layers[0].mlp;
    mlp.layers[0].weight = DenseMatrix(6, dim);
    SplitMix64 wrng(trial);
    for (double& x : mlp.layers[0].weight.entries) x = wrng.next_symmetric(1.0);

    std::vector<double> base(dim);
    for (double& e : base) e = wrng.next_symmetric(2.0);
    const std::size_t count = 2 + wrng.next_u64() % 5;
    std::vector<double> total(dim, 0.0);
    std::vector<double> sum_of_outputs(6, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double scale = 0.1 + 3.0 * wrng.next_double();
      std::vector<double> xi = base;
      for (double& e : xi) e *= scale;
      axpy(1.0, xi, total);
      axpy(1.0, mlp.apply(xi), sum_of_outputs);
    }
    const std::vector<double> output_of_sum = mlp.apply(total);
    CHECK(euclidean_distance(sum_of_outputs, output_of_sum) <=
          1e-11 * (1.0 + norm2(output_of_sum)));
  }
}

TEST_CASE("embedding table csv has node,layer wide rows") {
  const Graph g = parse_edge_list("0 1");
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 1, 2), 2);
  const std::string csv = forward(g, m).to_csv();
  CHECK(csv.find("node,layer,c0,c1\n") == 0);
  CHECK(csv.find("0,0,1,\n") != std::string::npos);  // layer 0 is width 1
}

TEST_CASE("layer dimension mismatches are caught") {
  const Graph g = parse_edge_list("0 1");
  const DenseMatrix wrong(2, 3, 1.0);
  CHECK_THROWS_AS(gcn_layer(g, wrong, scalar_weight(1.0)), DimensionError);
  MLPBlock mlp;
  mlp.layers.push_back(scalar_weight(1.0));
  CHECK_THROWS_AS(gin_layer(g, wrong, mlp, 0.0), DimensionError);
}
