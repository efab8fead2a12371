#include "doctest.h"

#include <cmath>

#include "walkgnn/analysis.hpp"
#include "walkgnn/rng.hpp"

using namespace walkgnn;

namespace {

// 20 small ER graphs with varied sizes, the corpus used by the correlation
// checks below.
GraphCollection er_corpus(std::uint64_t seed, std::size_t count = 20) {
  SplitMix64 rng(seed);
  std::vector<Graph> graphs;
  for (std::size_t i = 0; i < count; ++i) {
    graphs.push_back(generate({.kind = SyntheticKind::ErdosRenyi,
                               .n = 8 + rng.next_u64() % 9,
                               .edge_probability = 0.25 + 0.2 * rng.next_double(),
                               .seed = rng.next_u64()}));
  }
  return GraphCollection(std::move(graphs));
}

GraphCollection fig2_collection() {
  std::vector<Graph> graphs{generate({.kind = SyntheticKind::Fig2LeafOnHub}),
                            generate({.kind = SyntheticKind::Fig2Deg2Node}),
                            generate({.kind = SyntheticKind::Fig2Star3})};
  return GraphCollection(std::move(graphs));
}

}  // namespace

TEST_CASE("pairwise distances: two nodes give one pair") {
  const GraphCollection c(std::vector<Graph>{parse_edge_list("0 1")});
  const std::vector<WalkTable> walks{walk_counts(c.graph(0), 1)};
  const DistanceSet set = pairwise_walk_distances(walks, 1, WalkKind::Raw, c);
  REQUIRE(set.pairs.size() == 1);
  CHECK(set.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(set.values[0] == 0.0);  // both ends have w^(1) = 2
}

TEST_CASE("pairwise walk distances on P3 at k=1 follow the degrees") {
  const GraphCollection c(std::vector<Graph>{parse_edge_list("0 1\n1 2")});
  const std::vector<WalkTable> walks{walk_counts(c.graph(0), 1)};
  const DistanceSet set = pairwise_walk_distances(walks, 1, WalkKind::Raw, c);
  REQUIRE(set.pairs.size() == 3);
  CHECK(set.values[0] == 1.0);  // (0,1)
  CHECK(set.values[1] == 0.0);  // (0,2)
  CHECK(set.values[2] == 1.0);  // (1,2)
}

TEST_CASE("collapsed embeddings yield an all-zeros distance set") {
  const GraphCollection c(std::vector<Graph>{
      generate({.kind = SyntheticKind::ErdosRenyi, .n = 9, .edge_probability = 0.4, .seed = 2}),
      generate({.kind = SyntheticKind::Path, .n = 5})});
  const Model m = init_model(ModelSpec::uniform(Variant::DGCNN, 3, 8), 7);
  std::vector<EmbeddingTable> tables;
  for (const Graph& g : c.graphs()) tables.push_back(forward(g, m));
  const DistanceSet set = pairwise_embedding_distances(tables, 3, c);
  for (double v : set.values) CHECK(v <= 1e-10);
}

TEST_CASE("pearson basics") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  std::vector<double> linear;
  for (double x : xs) linear.push_back(2.0 * x + 1.0);
  CHECK(pearson(xs, linear).r == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> negated;
  for (double x : xs) negated.push_back(-x);
  CHECK(pearson(xs, negated).r == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("pearson matches the definitional formula on [1,2,3] vs [1,2,4]") {
  const std::vector<double> xs{1.0, 2.0, 3.0};
  const std::vector<double> ys{1.0, 2.0, 4.0};
  // definitional oracle, computed directly
  const double mean_x = 2.0, mean_y = 7.0 / 3.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  const double oracle = sxy / std::sqrt(sxx * syy);
  CHECK(oracle == doctest::Approx(3.0 / std::sqrt(2.0 * 14.0 / 3.0)).epsilon(1e-14));
  CHECK(pearson(xs, ys).r == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("pearson flags degenerate input instead of returning NaN") {
  const std::vector<double> constant{2.0, 2.0, 2.0};
  const std::vector<double> varying{1.0, 2.0, 3.0};
  const PearsonResult r = pearson(constant, varying);
  CHECK(r.degenerate);
  CHECK(std::isfinite(r.r));
  CHECK_THROWS_AS(pearson(varying, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("pearson is symmetric and shift/scale invariant") {
  SplitMix64 rng(3);
  std::vector<double> xs(40), ys(40);
  for (std::size_t i = 0; i < 40; ++i) {
    xs[i] = rng.next_symmetric(4.0);
    ys[i] = rng.next_symmetric(4.0);
  }
  const double base = pearson(xs, ys).r;
  CHECK(pearson(ys, xs).r == doctest::Approx(base).epsilon(1e-14));
  std::vector<double> transformed = xs;
  for (double& x : transformed) x = 3.5 * x + 11.0;
  CHECK(pearson(transformed, ys).r == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("GIN-0 zero-bias correlation is exactly 1 at every layer") {
  const GraphCollection corpus = er_corpus(101);
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 3, 8), 1);
  for (std::size_t k = 1; k <= 3; ++k) {
    const CorrelationReport report = correlate(corpus, m, k);
    CHECK_FALSE(report.degenerate);
    CHECK(report.walk_kind == WalkKind::Raw);
    CHECK(std::abs(report.pearson_r - 1.0) <= 1e-9);
  }
}

TEST_CASE("GCN correlation with normalized walks is exactly 1 at every layer") {
  const GraphCollection corpus = er_corpus(101);
  const Model m = init_model(ModelSpec::uniform(Variant::GCN, 3, 8), 1);
  for (std::size_t k = 1; k <= 3; ++k) {
    const CorrelationReport report = correlate(corpus, m, k);
    CHECK_FALSE(report.degenerate);
    CHECK(report.walk_kind == WalkKind::Normalized);
    CHECK(std::abs(report.pearson_r - 1.0) <= 1e-9);
  }
}

TEST_CASE("GIN-0 with small random biases stays highly correlated") {
  const GraphCollection corpus = er_corpus(101);
  ModelSpec spec = ModelSpec::uniform(Variant::GIN, 3, 8);
  spec.bias_mode = BiasMode::RandomSmall;
  const CorrelationReport report = correlate(corpus, init_model(spec, 1), 3);
  CHECK_FALSE(report.degenerate);
  CHECK(report.pearson_r >= 0.95);
}

TEST_CASE("DGCNN correlation is degenerate: the embedding side is constant") {
  const GraphCollection corpus = er_corpus(55, 6);
  const Model m = init_model(ModelSpec::uniform(Variant::DGCNN, 3, 8), 1);
  const CorrelationReport report = correlate(corpus, m, 3);
  CHECK(report.degenerate);
}

TEST_CASE("correlation scatter export carries both distance columns") {
  const GraphCollection corpus = er_corpus(9, 3);
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 3, 4), 2);
  const CorrelationReport report = correlate(corpus, m, 3);
  const std::string csv = report.scatter_csv();
  CHECK(csv.find("pair_v,pair_u,walk_dist,embed_dist\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + report.pair_count);
  const nlohmann::json j = report.to_json();
  CHECK(j.contains("pearson_r"));
  CHECK(j["pair_count"] == report.pair_count);
}

TEST_CASE("collapse_check passes for DGCNN and GAT, fails for GIN-0 on a star") {
  const Graph star = generate({.kind = SyntheticKind::Star, .n = 3});
  const Graph er = generate({.kind = SyntheticKind::ErdosRenyi,
                             .n = 14,
                             .edge_probability = 0.4,
                             .seed = 8});
  REQUIRE(er.min_degree() >= 1);
  for (const Variant variant : {Variant::DGCNN, Variant::GAT}) {
    const Model m = init_model(ModelSpec::uniform(variant, 3, 8), 19);
    CHECK(collapse_check(forward(er, m), 3, 1e-10).pass);
    CHECK(collapse_check(forward(star, m), 3, 1e-10).pass);
  }
  // star(3): center aggregates 4 ones, leaves 2, so layer 1 must split them
  const Model gin = init_model(ModelSpec::uniform(Variant::GIN, 1, 8), 19);
  const CollapseReport report = collapse_check(forward(star, gin), 1, 1e-10);
  CHECK_FALSE(report.pass);
  CHECK(report.max_deviation > 1e-6);
}

TEST_CASE("proportionality_check: regular-graph GCN is trivially proportional") {
  const Graph c5 = generate({.kind = SyntheticKind::Cycle, .n = 5});
  const Model m = init_model(ModelSpec::uniform(Variant::GCN, 2, 6), 3);
  const ProportionalityReport report = proportionality_check(
      forward(c5, m), normalized_walk_sums(c5, 2), WalkKind::Normalized, 2, 1e-9);
  CHECK(report.pass);
}

TEST_CASE("proportionality_check passes for zero-bias GIN-0 on P4") {
  const Graph p4 = parse_edge_list("0 1\n1 2\n2 3");
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 2, 8), 5);
  const ProportionalityReport report =
      proportionality_check(forward(p4, m), walk_counts(p4, 2), WalkKind::Raw, 2, 1e-9);
  CHECK(report.pass);
}

TEST_CASE("proportionality_check reports (not throws) under real biases") {
  const Graph p4 = parse_edge_list("0 1\n1 2\n2 3");
  ModelSpec spec = ModelSpec::uniform(Variant::GIN, 2, 8);
  spec.bias_mode = BiasMode::RandomSmall;
  Model m = init_model(spec, 5);
  // exaggerate the biases to 0.5 so the homogeneity argument clearly breaks
  for (ModelLayer& layer : m.layers)
    for (LinearLayer& sub : layer.mlp.layers)
      for (double& b : sub.bias) b = 0.5;
  const ProportionalityReport report =
      proportionality_check(forward(p4, m), walk_counts(p4, 2), WalkKind::Raw, 2, 1e-9);
  CHECK_FALSE(report.pass);
  CHECK(report.max_violation > 1e-6);
}

TEST_CASE("proportionality_check validates its inputs") {
  const Graph p3 = parse_edge_list("0 1\n1 2");
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 2, 4), 1);
  const EmbeddingTable table = forward(p3, m);
  CHECK_THROWS_AS(proportionality_check(table, walk_counts(p3, 2), WalkKind::Normalized, 2, 1e-9),
                  UsageError);
  CHECK_THROWS_AS(proportionality_check(table, walk_counts(p3, 1), WalkKind::Raw, 2, 1e-9),
                  UsageError);
}

TEST_CASE("readout census: sum counts nodes, mean collapses to one vector") {
  std::vector<Graph> graphs{generate({.kind = SyntheticKind::Path, .n = 3}),
                            generate({.kind = SyntheticKind::Cycle, .n = 6}),
                            generate({.kind = SyntheticKind::ErdosRenyi,
                                      .n = 9,
                                      .edge_probability = 0.4,
                                      .seed = 77})};
  const GraphCollection c(std::move(graphs));
  for (const Variant variant : {Variant::DGCNN, Variant::GAT}) {
    if (variant == Variant::GAT) {
      for (const Graph& g : c.graphs())
        if (g.min_degree() == 0) continue;
    }
    const Model m = init_model(ModelSpec::uniform(variant, 3, 8), 13);
    const ReadoutCensusReport sum = readout_census(c, m, ReadoutMode::Sum);
    CHECK(sum.pass);
    const ReadoutCensusReport mean = readout_census(c, m, ReadoutMode::Mean);
    CHECK(mean.pass);
    // explicit ratio: |G_1| = 2 |G_0|
    for (std::size_t i = 0; i < sum.graph_vectors[0].size(); ++i) {
      CHECK(sum.graph_vectors[1][i] ==
            doctest::Approx(2.0 * sum.graph_vectors[0][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("readout census: single graph is a vacuous pass") {
  const GraphCollection c(std::vector<Graph>{generate({.kind = SyntheticKind::Path, .n = 4})});
  const Model m = init_model(ModelSpec::uniform(Variant::DGCNN, 2, 4), 1);
  CHECK(readout_census(c, m, ReadoutMode::Sum).pass);
  CHECK(readout_census(c, m, ReadoutMode::Mean).pass);
}

TEST_CASE("readout census rejects non-collapsing variants") {
  const GraphCollection c(std::vector<Graph>{generate({.kind = SyntheticKind::Path, .n = 4})});
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 2, 4), 1);
  CHECK_THROWS_AS(readout_census(c, m, ReadoutMode::Sum), UsageError);
}

TEST_CASE("fig2 collision witness: three red nodes, degrees 1/2/3, w=10") {
  const GraphCollection c = fig2_collection();
  const std::vector<CollisionWitness> witnesses = find_walk_collisions(c, 2, true);
  REQUIRE(witnesses.size() == 1);
  const CollisionWitness& w = witnesses[0];
  CHECK(w.shared_count == 10);
  REQUIRE(w.nodes.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(w.nodes[i] == std::pair<std::size_t, NodeId>{i, kFig2RedNode});
  }
  std::vector<std::size_t> degrees = w.degrees;
  std::sort(degrees.begin(), degrees.end());
  CHECK(degrees == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("fig2 witness nodes are embedded identically by zero-bias GIN-0") {
  const GraphCollection c = fig2_collection();
  const Model m = init_model(ModelSpec::uniform(Variant::GIN, 2, 8), 4);
  const std::vector<CollisionWitness> witnesses = find_walk_collisions(c, 2, true, &m);
  REQUIRE(witnesses.size() == 1);
  REQUIRE(witnesses[0].max_embedding_distance.has_value());
  CHECK(*witnesses[0].max_embedding_distance <= 1e-9);
}

TEST_CASE("collision witnesses serialize and respect the degree filter") {
  const GraphCollection c = fig2_collection();
  const std::vector<CollisionWitness> all = find_walk_collisions(c, 2, false);
  CHECK(all.size() >= 2);  // the w=10 triple plus same-degree groups
  const nlohmann::json j = all[0].to_json();
  CHECK(j.contains("count"));
  CHECK(j["nodes"].size() >= 2);
}

TEST_CASE("single-node collection has no collisions") {
  const GraphCollection c(std::vector<Graph>{parse_edge_list("", 1)});
  CHECK(find_walk_collisions(c, 2, false).empty());
}
