#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "strucmix/datasets.hpp"
#include "strucmix/mixing.hpp"

using namespace strucmix;

namespace {

LabeledGraph two_triangles_ab() {
  // disjoint same-label triangles: labels A,A
  return LabeledGraph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, {0, 0, 0, 1, 1, 1});
}

LabeledGraph k22_by_side() {
  return LabeledGraph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, {0, 0, 1, 1});
}

LabeledGraph barbell6() {
  return LabeledGraph(6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}},
                      {0, 0, 0, 1, 1, 1});
}

}  // namespace

TEST_CASE("global mixing matrix on hand-enumerable graphs", "[mixing]") {
  auto m = global_mixing_matrix(two_triangles_ab());
  CHECK(m.at(0, 0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(m.at(1, 1) == Catch::Approx(0.5).margin(1e-12));
  CHECK(m.at(0, 1) == 0.0);

  auto mb = global_mixing_matrix(k22_by_side());
  CHECK(mb.at(0, 1) == Catch::Approx(0.5).margin(1e-12));
  CHECK(mb.at(1, 0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(mb.at(0, 0) == 0.0);

  // 5-node mixed example, all directed half-edges enumerated by hand:
  // edges 0-1,1-2,2-3,3-4,4-0,0-2 with labels A,A,B,B,A give
  // M = [[4,3],[3,2]]/12
  LabeledGraph g5(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}}, {0, 0, 1, 1, 0});
  auto m5 = global_mixing_matrix(g5);
  CHECK(m5.at(0, 0) == Catch::Approx(4.0 / 12).margin(1e-12));
  CHECK(m5.at(0, 1) == Catch::Approx(3.0 / 12).margin(1e-12));
  CHECK(m5.at(1, 0) == Catch::Approx(3.0 / 12).margin(1e-12));
  CHECK(m5.at(1, 1) == Catch::Approx(2.0 / 12).margin(1e-12));

  LabeledGraph unlabeled(3, {{0, 1}, {1, 2}});
  CHECK_THROWS_AS(global_mixing_matrix(unlabeled), DataError);
}

TEST_CASE("global assortativity extremes and the 5-node value", "[mixing]") {
  CHECK(global_assortativity(two_triangles_ab()) == Catch::Approx(1.0).margin(1e-12));
  CHECK(global_assortativity(k22_by_side()) == Catch::Approx(-1.0).margin(1e-12));

  LabeledGraph g5(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}}, {0, 0, 1, 1, 0});
  CHECK(global_assortativity(g5) == Catch::Approx(-1.0 / 35).margin(1e-12));

  LabeledGraph single(3, {{0, 1}, {1, 2}}, {0, 0, 0});
  CHECK_THROWS_AS(global_assortativity(single), NumericalError);
}

TEST_CASE("mixing matrix sums to one on random labeled graphs", "[mixing][property]") {
  RngStream rng(3, "mixing-sum");
  for (int trial = 0; trial < 40; ++trial) {
    auto g = oracle::random_labeled_graph(2 + rng.uniform_int(0, 48), 0.15, 3, rng);
    if (g.num_edges() == 0) continue;
    auto m = global_mixing_matrix(g);
    CHECK(m.sum() == Catch::Approx(1.0).margin(1e-9));
    // undirected input: symmetric within 1e-9
    for (int a = 0; a < m.num_classes; ++a)
      for (int b = 0; b < m.num_classes; ++b)
        CHECK(m.at(a, b) == Catch::Approx(m.at(b, a)).margin(1e-9));
  }
}

TEST_CASE("ppr weights: restart extremes and the path-graph solve", "[mixing]") {
  LabeledGraph path(3, {{0, 1}, {1, 2}});

  auto w0 = ppr_weights(path, 0, 0.0);
  CHECK(w0.w == std::vector<double>{1.0, 0.0, 0.0});

  // alpha = 1: stationary distribution d_i / 2m
  auto w1 = ppr_weights(path, 0, 1.0);
  CHECK(w1.w[0] == Catch::Approx(0.25).margin(1e-12));
  CHECK(w1.w[1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(w1.w[2] == Catch::Approx(0.25).margin(1e-12));

  // alpha = 0.5: hand linear solve gives (7/12, 1/3, 1/12); the dense-solve
  // oracle must agree before we trust it elsewhere
  auto dense = oracle::ppr_dense(path, 0, 0.5);
  CHECK(dense[0] == Catch::Approx(7.0 / 12).margin(1e-12));
  CHECK(dense[1] == Catch::Approx(1.0 / 3).margin(1e-12));
  CHECK(dense[2] == Catch::Approx(1.0 / 12).margin(1e-12));
  auto w = ppr_weights(path, 0, 0.5);
  for (int i = 0; i < 3; ++i) CHECK(w.w[i] == Catch::Approx(dense[i]).margin(1e-9));

  CHECK_THROWS_AS(ppr_weights(path, 0, 1.5), std::invalid_argument);
  LabeledGraph lonely(2, {});
  CHECK_THROWS_AS(ppr_weights(lonely, 0, 0.5), NumericalError);
}

TEST_CASE("ppr weights are distributions on random graphs", "[mixing][property]") {
  RngStream rng(5, "ppr-prop");
  for (int trial = 0; trial < 20; ++trial) {
    auto g = oracle::random_labeled_graph(3 + rng.uniform_int(0, 20), 0.3, 2, rng, true);
    int l = rng.uniform_int(0, g.num_nodes() - 1);
    double alpha = rng.uniform(0.0, 0.95);
    auto w = ppr_weights(g, l, alpha);
    double total = 0;
    for (double x : w.w) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-6));
    // oracle agreement
    auto dense = oracle::ppr_dense(g, l, alpha);
    for (int i = 0; i < g.num_nodes(); ++i)
      CHECK(w.w[i] == Catch::Approx(dense[i]).margin(1e-8));
  }
}

TEST_CASE("totalrank weights: series structure and triangle oracle", "[mixing]") {
  LabeledGraph lonely(2, {{0, 1}});
  LabeledGraph single_member(3, {{0, 1}});
  auto w_single = totalrank_weights(single_member, 2, 1e-8);
  CHECK(w_single.w[2] == Catch::Approx(1.0).margin(1e-12));  // isolated seed keeps all mass

  // k=0 term alone contributes e_l / 2 before renormalization; with a
  // degenerate single-node component renormalization restores e_l exactly
  LabeledGraph triangle(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 1, 1});
  auto w = totalrank_weights(triangle, 0, 1e-12);

  // closed form on the triangle: w_0 = 1/3 + (2/3) * (6 ln(3/2) - 2)
  double s = 6.0 * std::log(1.5) - 2.0;
  double expect0 = 1.0 / 3 + 2.0 / 3 * s;
  CHECK(w.w[0] == Catch::Approx(expect0).margin(1e-9));
  CHECK(w.w[1] == Catch::Approx((1 - expect0) / 2).margin(1e-9));

  // 1000-term dense series oracle
  auto series = oracle::totalrank_series(triangle, 0, 200000);
  for (int i = 0; i < 3; ++i) CHECK(w.w[i] == Catch::Approx(series[i]).margin(1e-5));

  CHECK_THROWS_AS(totalrank_weights(triangle, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(totalrank_weights(triangle, 0, -1.0), std::invalid_argument);
}

TEST_CASE("totalrank converges as tol shrinks, including bipartite components",
          "[mixing][property]") {
  RngStream rng(9, "totalrank-prop");
  // K22 is bipartite: the walk 2-cycles and never converges pointwise
  LabeledGraph k22 = k22_by_side();
  auto series = oracle::totalrank_series(k22, 0, 2000);
  auto w = totalrank_weights(k22, 0, 1e-8);
  for (int i = 0; i < 4; ++i) CHECK(w.w[i] == Catch::Approx(series[i]).margin(1e-3));

  for (int trial = 0; trial < 8; ++trial) {
    auto g = oracle::random_labeled_graph(3 + rng.uniform_int(0, 14), 0.3, 2, rng, true);
    int l = rng.uniform_int(0, g.num_nodes() - 1);
    double tol = 1e-3;
    auto coarse = totalrank_weights(g, l, tol);
    auto fine = totalrank_weights(g, l, tol / 2);
    double l1 = 0;
    for (int i = 0; i < g.num_nodes(); ++i) l1 += std::abs(coarse.w[i] - fine.w[i]);
    CHECK(l1 < tol);
    auto dense = oracle::totalrank_series(g, l, 4000);
    for (int i = 0; i < g.num_nodes(); ++i)
      CHECK(fine.w[i] == Catch::Approx(dense[i]).margin(2e-3));
  }
}

TEST_CASE("local mixing matrix reductions", "[mixing]") {
  auto g = barbell6();
  auto wg = WalkGraph::from_graph(g);

  // w = pi reproduces the global mixing matrix on a connected graph
  auto pi = ppr_weights(g, 0, 1.0);
  auto local = local_mixing_matrix(g, pi);
  auto global = global_mixing_matrix(g);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(local.at(a, b) == Catch::Approx(global.at(a, b)).margin(1e-9));

  // w = e_l with all neighbors in class h: full row mass pre-symmetrization
  NodeWeightVector e0{0, {1, 0, 0, 0, 0, 0}};
  auto m0 = local_mixing_matrix(g, e0);
  CHECK(m0.at(0, 0) == Catch::Approx(1.0).margin(1e-12));

  // two-community example, w uniform on the bridge nodes {2,3}:
  // hand enumeration gives [[1/3, 1/6], [1/6, 1/3]]
  NodeWeightVector bridge{2, {0, 0, 0.5, 0.5, 0, 0}};
  auto mb = local_mixing_matrix(g, bridge);
  CHECK(mb.at(0, 0) == Catch::Approx(1.0 / 3).margin(1e-12));
  CHECK(mb.at(0, 1) == Catch::Approx(1.0 / 6).margin(1e-12));
  CHECK(mb.at(1, 0) == Catch::Approx(1.0 / 6).margin(1e-12));
  CHECK(mb.at(1, 1) == Catch::Approx(1.0 / 3).margin(1e-12));

  LabeledGraph no_labels(3, {{0, 1}, {1, 2}});
  NodeWeightVector w{0, {1, 0, 0}};
  CHECK_THROWS_AS(
      local_mixing_matrix(WalkGraph::from_graph(no_labels), no_labels.labels(), 1, w), DataError);
}

TEST_CASE("local assortativity: extremes, identity and the planted node", "[mixing]") {
  // TotalRank mass entirely on same-label edges
  auto tt = two_triangles_ab();
  for (int l = 0; l < 6; ++l) {
    auto r = local_assortativity(tt, l);
    REQUIRE(r.has_value());
    CHECK(*r == Catch::Approx(1.0).margin(1e-9));
  }

  // substituting w = pi recovers r_global exactly, for every node
  auto g = barbell6();
  auto wg = WalkGraph::from_graph(g);
  auto global = global_mixing_matrix(g);
  double r_global = global_assortativity(global);
  detail::AssortativityContext ctx(global);
  for (int l = 0; l < g.num_nodes(); ++l) {
    auto r = local_assortativity_with(wg, g.labels(), 2, ctx, ppr_weights(g, l, 1.0));
    REQUIRE(r.has_value());
    CHECK(*r == Catch::Approx(r_global).margin(1e-10));
  }

  // 8-node star-with-pendants: hub 0 labeled B, leaves labeled A, two A-A
  // edges planted among leaves; the hub must come out disassortative
  LabeledGraph planted(
      8, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}, {3, 4}, {5, 6}, {6, 7}},
      {1, 0, 0, 0, 0, 0, 0, 0});
  auto r_hub = local_assortativity(planted, 0);
  REQUIRE(r_hub.has_value());
  CHECK(*r_hub < 0.0);
  // dense-series oracle for the same quantity
  auto w_oracle = oracle::totalrank_series(planted, 0, 100000);
  double r_oracle = oracle::local_assortativity_dense(planted, w_oracle);
  CHECK(*r_hub == Catch::Approx(r_oracle).margin(1e-4));

  // a single-label component in a multi-label graph sits at the numerator =
  // denominator extreme
  LabeledGraph two_comp(5, {{0, 1}, {2, 3}, {3, 4}}, {0, 0, 1, 1, 1});
  CHECK(*local_assortativity(two_comp, 0) == Catch::Approx(1.0).margin(1e-9));

  // undefined cases: unlabeled seed, isolated seed, single-label graph
  LabeledGraph part_unlabeled(3, {{0, 1}, {1, 2}}, {0, 1, -1});
  CHECK_FALSE(local_assortativity(part_unlabeled, 2).has_value());
  LabeledGraph with_isolated(4, {{0, 1}, {1, 2}}, {0, 1, 0, 1});
  CHECK_FALSE(local_assortativity(with_isolated, 3).has_value());
  LabeledGraph single(3, {{0, 1}, {1, 2}}, {0, 0, 0});
  CHECK_FALSE(local_assortativity(single, 0).has_value());
}

TEST_CASE("pi-substitution identity holds on random connected graphs", "[mixing][property]") {
  RngStream rng(13, "identity-prop");
  for (int trial = 0; trial < 12; ++trial) {
    auto g = oracle::random_labeled_graph(4 + rng.uniform_int(0, 16), 0.2, 3, rng, true);
    auto wg = WalkGraph::from_graph(g);
    auto global = global_mixing_matrix(g);
    double r_global = global_assortativity(global);
    detail::AssortativityContext ctx(global);
    for (int l = 0; l < g.num_nodes(); ++l) {
      auto r = local_assortativity_with(wg, g.labels(), g.num_classes(), ctx,
                                        ppr_weights(wg, l, 1.0));
      REQUIRE(r.has_value());
      CHECK(*r == Catch::Approx(r_global).margin(1e-8));
    }
  }
}

TEST_CASE("label smoothness", "[mixing]") {
  LabeledGraph g(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}, {0, 0, 0, 0, 1, 1});
  CHECK(*label_smoothness(g, 0) == Catch::Approx(0.6).margin(1e-12));  // 3 of 5 share
  LabeledGraph all_same(3, {{0, 1}, {0, 2}}, {0, 0, 0});
  CHECK(*label_smoothness(all_same, 0) == 1.0);
  LabeledGraph none(3, {{0, 1}, {0, 2}}, {0, 1, 1});
  CHECK(*label_smoothness(none, 0) == 0.0);
  LabeledGraph isolated(2, {}, {0, 0});
  CHECK_FALSE(label_smoothness(isolated, 0).has_value());
}

TEST_CASE("feature smoothness", "[mixing]") {
  // u's features equal the neighbor mean -> 0
  std::vector<double> x = {1, 1, /*n1*/ 0, 0, /*n2*/ 2, 2};
  LabeledGraph g(3, {{0, 1}, {0, 2}}, {0, 0, 0}, x, 2);
  CHECK(*feature_smoothness(g, 0) == Catch::Approx(0.0).margin(1e-12));

  std::vector<double> y = {1, 0, /*n*/ 0, 0};
  LabeledGraph g2(2, {{0, 1}}, {0, 0}, y, 2);
  CHECK(*feature_smoothness(g2, 0) == Catch::Approx(1.0).margin(1e-12));

  // 4-neighbor case: u=(1,2), neighbors (1,0),(2,1),(3,3),(0,0):
  // mean (1.5,1.0), lambda = 0.25 + 1 = 1.25
  std::vector<double> z = {1, 2, 1, 0, 2, 1, 3, 3, 0, 0};
  LabeledGraph g3(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {0, 0, 0, 0, 0}, z, 2);
  CHECK(*feature_smoothness(g3, 0) == Catch::Approx(1.25).margin(1e-12));

  LabeledGraph no_feat(2, {{0, 1}});
  CHECK_FALSE(feature_smoothness(no_feat, 0).has_value());
}

TEST_CASE("assortativity profile: extremes and histogram", "[mixing]") {
  auto p1 = assortativity_profile(two_triangles_ab());
  for (auto& r : p1.r_local) {
    REQUIRE(r.has_value());
    CHECK(*r == Catch::Approx(1.0).margin(1e-9));
  }
  CHECK(p1.histogram[AssortativityProfile::kBins - 1] == 6);

  auto p2 = assortativity_profile(k22_by_side());
  for (auto& r : p2.r_local) {
    REQUIRE(r.has_value());
    CHECK(*r == Catch::Approx(-1.0).margin(1e-9));
  }
  CHECK(p2.histogram[0] == 4);
}

TEST_CASE("label smoothness correlates with local assortativity", "[mixing][property]") {
  PlantedPartitionSpec spec;
  spec.blocks = 3;
  spec.block_size = 40;
  spec.p_intra = 0.2;
  spec.p_inter = 0.05;
  spec.seed = 21;
  auto g = gen_planted_partition(spec);
  auto profile = assortativity_profile(g);
  std::vector<double> eps, rloc;
  for (int u = 0; u < g.num_nodes(); ++u) {
    auto e = label_smoothness(g, u);
    if (!e || !profile.r_local[u]) continue;
    eps.push_back(*e);
    rloc.push_back(*profile.r_local[u]);
  }
  REQUIRE(eps.size() >= 100);
  CHECK(oracle::spearman_rank_correlation(eps, rloc) > 0.0);
}
