#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "oracles.hpp"
#include "strucmix/compgraph.hpp"
#include "strucmix/datasets.hpp"

using namespace strucmix;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("naive build: weights, bounds and proximity relation", "[compgraph]") {
  RngStream rng(41, "compgraph-naive");
  auto g = oracle::random_labeled_graph(12, 0.3, 2, rng);
  int T = 2;
  auto c = build_naive(g, T);

  CHECK(c.num_nodes == g.num_nodes());
  CHECK(c.T == T);
  REQUIRE(static_cast<int>(c.structural.size()) == T + 1);

  // proximity edges are exactly E(G) at weight 1
  REQUIRE(c.proximity.size() == g.edges().size());
  for (std::size_t i = 0; i < c.proximity.size(); ++i) {
    CHECK(c.proximity[i].u == g.edges()[i].first);
    CHECK(c.proximity[i].v == g.edges()[i].second);
    CHECK(c.proximity[i].w == 1.0);
  }

  long bound = static_cast<long>(T + 1) * g.num_nodes() * (g.num_nodes() - 1) / 2;
  CHECK(c.structural_edge_count() <= bound);

  DegreeSequenceCache cache(g, T);
  for (int tau = 0; tau <= T; ++tau) {
    for (auto& e : c.structural[tau]) {
      CHECK(e.u < e.v);  // canonical, no self-edges
      CHECK(e.w > 0.0);
      CHECK(e.w <= 1.0);
      auto row = structural_distances(cache, e.u, e.v);
      REQUIRE(row.f[tau].has_value());
      CHECK(e.w == Catch::Approx(std::exp(-*row.f[tau])).margin(1e-15));
    }
  }

  // f = 0 gives weight exactly 1: two isolated-in-ring twins, e.g. a 4-cycle
  LabeledGraph cyc(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto cc = build_naive(cyc, 0);
  for (auto& e : cc.structural[0]) CHECK(e.w == 1.0);  // all degrees equal

  CHECK_THROWS_AS(build_naive(g, -1), std::invalid_argument);
}

TEST_CASE("weight of ln 2 distance halves the edge", "[compgraph]") {
  CHECK(std::exp(-std::log(2.0)) == Catch::Approx(0.5).margin(1e-15));
  // a pair whose tau=0 distance is d(a,b) = exp(ln 2): degrees 2 and 1 give
  // f0 = 1, so pick degrees with ratio e^{ln2} = 2 -> cost 1 -> w = e^{-1}.
  LabeledGraph g(4, {{0, 1}, {0, 2}, {3, 1}});
  auto c = build_naive(g, 0);
  for (auto& e : c.structural[0]) {
    if (e.u == 0 && e.v == 3) CHECK(e.w == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  }
}

TEST_CASE("practical build is a subset of naive with identical weights",
          "[compgraph][property]") {
  RngStream rng(43, "compgraph-practical");
  for (int trial = 0; trial < 8; ++trial) {
    auto g = oracle::random_labeled_graph(10 + rng.uniform_int(0, 20), 0.2, 2, rng);
    int T = 1 + rng.uniform_int(0, 1);
    auto naive = build_naive(g, T);
    auto practical = build_practical(g, T);

    CHECK(practical.proximity == naive.proximity);

    for (int tau = 0; tau <= T; ++tau) {
      std::map<std::pair<int, int>, double> full;
      for (auto& e : naive.structural[tau]) full[{e.u, e.v}] = e.w;
      for (auto& e : practical.structural[tau]) {
        auto it = full.find({e.u, e.v});
        REQUIRE(it != full.end());
        CHECK(e.w == it->second);  // same code path, bitwise equal
      }
      CHECK(practical.structural[tau].size() <= naive.structural[tau].size());
    }

    // budget bound: candidates are a symmetric +-budget window in the sorted
    // degree array, so each node touches at most 2*budget pairs per relation
    int budget = practical.budget_per_side;
    std::vector<int> incident(g.num_nodes(), 0);
    for (auto& e : practical.structural[0]) {
      ++incident[e.u];
      ++incident[e.v];
    }
    for (int u = 0; u < g.num_nodes(); ++u) CHECK(incident[u] <= 2 * budget);
  }
}

TEST_CASE("practical default budget is ceil(log2 n)", "[compgraph]") {
  RngStream rng(47, "budget");
  auto g = oracle::random_labeled_graph(30, 0.2, 2, rng);
  auto c = build_practical(g, 1);
  CHECK(c.budget_per_side == 5);  // ceil(log2 30)
}

TEST_CASE("weight floor drops weak structural edges and is recorded", "[compgraph]") {
  RngStream rng(53, "floor");
  auto g = oracle::random_labeled_graph(14, 0.3, 2, rng);
  BuildOptions opt;
  opt.weight_floor = 0.5;
  auto c = build_naive(g, 1, opt);
  for (auto& rel : c.structural)
    for (auto& e : rel) CHECK(e.w >= 0.5);
  auto path = temp_path("floor.tsv");
  save_computation_graph(c, path);
  auto back = load_computation_graph(path);
  CHECK(back.weight_floor == 0.5);
}

TEST_CASE("serialization: format, round trip, byte stability", "[compgraph]") {
  RngStream rng(59, "serialize");
  auto g = oracle::random_labeled_graph(16, 0.25, 2, rng);
  auto c = build_practical(g, 2);

  auto path = temp_path("comp_rt.tsv");
  save_computation_graph(c, path);
  auto text = slurp(path);
  CHECK(text.find("src\tdst\trel\tweight\n") != std::string::npos);

  auto back = load_computation_graph(path);
  CHECK(back == c);
  CHECK(back.mode == "practical");
  CHECK(back.budget_per_side == c.budget_per_side);

  auto path2 = temp_path("comp_rt2.tsv");
  save_computation_graph(back, path2);
  CHECK(slurp(path2) == text);  // byte-identical re-serialization
}

TEST_CASE("serialization corner cases and errors", "[compgraph]") {
  // one isolated node: no pairs, no edges, header only
  LabeledGraph lone(1, {});
  auto c = build_naive(lone, 0);
  auto path = temp_path("comp_lone.tsv");
  save_computation_graph(c, path);
  auto back = load_computation_graph(path);
  CHECK(back.num_nodes == 1);
  CHECK(back.structural_edge_count() == 0);
  CHECK(back.proximity.empty());

  auto bad1 = temp_path("comp_bad1.tsv");
  std::ofstream(bad1) << "src\tdst\trel\tweight\n0\t1\tp\n";
  CHECK_THROWS_MATCHES(load_computation_graph(bad1), ParseError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(":2:")));

  auto bad2 = temp_path("comp_bad2.tsv");
  std::ofstream(bad2) << "src\tdst\trel\tweight\n0\t1\tp\t1\n";  // missing mirror row
  CHECK_THROWS_AS(load_computation_graph(bad2), DataError);

  auto bad3 = temp_path("comp_bad3.tsv");
  std::ofstream(bad3) << "0\t1\tp\t1\n";  // no header row
  CHECK_THROWS_AS(load_computation_graph(bad3), ParseError);

  auto bad4 = temp_path("comp_bad4.tsv");
  std::ofstream(bad4) << "src\tdst\trel\tweight\n0\t1\tp\t1.5\n1\t0\tp\t1.5\n";
  CHECK_THROWS_AS(load_computation_graph(bad4), ParseError);  // weight outside (0,1]
}

TEST_CASE("round trip on random graphs", "[compgraph][property]") {
  RngStream rng(61, "serialize-prop");
  for (int trial = 0; trial < 6; ++trial) {
    auto g = oracle::random_labeled_graph(6 + rng.uniform_int(0, 14), 0.3, 2, rng);
    auto c = build_naive(g, 1 + rng.uniform_int(0, 2));
    auto path = temp_path("comp_prop.tsv");
    save_computation_graph(c, path);
    CHECK(load_computation_graph(path) == c);
  }
}

TEST_CASE("builds are deterministic across thread counts", "[compgraph]") {
  RngStream rng(67, "threads");
  auto g = oracle::random_labeled_graph(24, 0.2, 2, rng);
  BuildOptions seq, par;
  seq.threads = 1;
  par.threads = 4;
  auto a = build_naive(g, 2, seq);
  auto b = build_naive(g, 2, par);
  CHECK(a == b);
  auto pa = build_practical(g, 2, 0, seq);
  auto pb = build_practical(g, 2, 0, par);
  CHECK(pa == pb);
}

TEST_CASE("union walk graph sums relation weights", "[compgraph]") {
  LabeledGraph g(3, {{0, 1}, {1, 2}});
  auto c = build_naive(g, 1);
  auto wg = union_walk_graph(c);
  // strength of node u = sum over relations of incident weights
  std::vector<double> expect(3, 0.0);
  for (auto& rel : c.structural)
    for (auto& e : rel) {
      expect[e.u] += e.w;
      expect[e.v] += e.w;
    }
  for (auto& e : c.proximity) {
    expect[e.u] += e.w;
    expect[e.v] += e.w;
  }
  for (int u = 0; u < 3; ++u) CHECK(wg.strength[u] == Catch::Approx(expect[u]).margin(1e-12));
}

TEST_CASE("computation graph shifts disassortative nodes upward", "[compgraph][shift]") {
  StructuralTwinsSpec spec;
  spec.seed = 5;
  auto g = gen_structural_twins(spec);
  auto c = build_practical(g, 3);
  auto rep = shift_report(g, c);
  REQUIRE(rep.nodes.size() >= 10);
  CHECK(rep.mean_after > rep.mean_before);
}
