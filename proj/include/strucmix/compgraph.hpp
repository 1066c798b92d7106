#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string_view>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "strucmix/errors.hpp"
#include "strucmix/graph.hpp"
#include "strucmix/mixing.hpp"
#include "strucmix/parallel.hpp"
#include "strucmix/structdist.hpp"

namespace strucmix {

namespace detail {

// Serialized weight precision: 12 significant digits. Round-trip equality is
// defined at this precision.
inline bool same_weight_12(double a, double b) {
  if (a == b) return true;
  char ba[64], bb[64];
  std::snprintf(ba, sizeof ba, "%.12g", a);
  std::snprintf(bb, sizeof bb, "%.12g", b);
  return std::string_view(ba) == std::string_view(bb);
}

}  // namespace detail

struct RelEdge {
  int u = 0, v = 0;  // canonical u < v
  double w = 1.0;
  bool operator==(const RelEdge& o) const {
    return u == o.u && v == o.v && detail::same_weight_12(w, o.w);
  }
};

// Weighted multi-relational computation graph: structural relations 0..T with
// weights e^{-f_tau}, plus the proximity relation carrying the original edges
// at weight 1. Symmetric by construction; each edge is stored once per
// unordered pair.
struct ComputationGraph {
  int num_nodes = 0;
  int T = -1;
  std::vector<std::vector<RelEdge>> structural;  // [tau], sorted by (u,v)
  std::vector<RelEdge> proximity;                // weight exactly 1, sorted

  // build metadata, carried into the serialized header
  std::string mode = "naive";
  int budget_per_side = 0;  // 0 for naive
  double weight_floor = 0;

  long structural_edge_count() const {
    long c = 0;
    for (auto& rel : structural) c += static_cast<long>(rel.size());
    return c;
  }

  int num_relations() const { return T + 2; }  // 0..T plus proximity

  bool operator==(const ComputationGraph& o) const {
    return num_nodes == o.num_nodes && T == o.T && structural == o.structural &&
           proximity == o.proximity;
  }
};

struct BuildOptions {
  double weight_floor = 0;  // drop structural edges with w < floor (0 = keep all)
  StructOptions structural;
  int threads = 1;
};

namespace detail {

inline void fill_proximity(const LabeledGraph& g, ComputationGraph& c) {
  c.proximity.clear();
  c.proximity.reserve(g.edges().size());
  for (auto& [u, v] : g.edges()) c.proximity.push_back({u, v, 1.0});
}

// Computes structural edges for a fixed list of canonical pairs; pair order is
// preserved into per-relation edge lists, so output is independent of the
// number of worker threads.
inline void fill_structural(const LabeledGraph& g, int T, const BuildOptions& opt,
                            const std::vector<std::pair<int, int>>& pairs,
                            ComputationGraph& c) {
  DegreeSequenceCache cache(g, T, opt.structural);
  parallel_for(g.num_nodes(), opt.threads, [&](std::size_t u) { cache.warm(static_cast<int>(u)); });

  std::vector<DistanceRow> rows(pairs.size());
  parallel_for(pairs.size(), opt.threads, [&](std::size_t i) {
    rows[i] = structural_distances(cache, pairs[i].first, pairs[i].second);
  });

  c.structural.assign(T + 1, {});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (int tau = 0; tau <= T; ++tau) {
      if (!rows[i].f[tau]) break;
      double w = std::exp(-*rows[i].f[tau]);
      if (opt.weight_floor > 0 && w < opt.weight_floor) continue;
      c.structural[tau].push_back({pairs[i].first, pairs[i].second, w});
    }
  }
}

}  // namespace detail

// Algorithm: all-pairs construction. Every unordered pair contributes one
// structural edge per defined hop level.
inline ComputationGraph build_naive(const LabeledGraph& g, int T, const BuildOptions& opt = {}) {
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  ComputationGraph c;
  c.num_nodes = g.num_nodes();
  c.T = T;
  c.mode = "naive";
  c.weight_floor = opt.weight_floor;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(g.num_nodes()) * (g.num_nodes() - 1) / 2);
  for (int u = 0; u < g.num_nodes(); ++u)
    for (int v = u + 1; v < g.num_nodes(); ++v) pairs.emplace_back(u, v);
  detail::fill_structural(g, T, opt, pairs, c);
  detail::fill_proximity(g, c);
  return c;
}

// Degree-sorted candidate construction: each node considers only the
// budget_per_side positions on either side of its own slot in the sorted
// degree array, for O(n log n) pair computations with the default budget
// ceil(log2 n).
inline ComputationGraph build_practical(const LabeledGraph& g, int T, int budget_per_side = 0,
                                        const BuildOptions& opt = {}) {
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  int n = g.num_nodes();
  if (budget_per_side <= 0)
    budget_per_side = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(2, n)))));

  std::vector<std::pair<int, int>> by_degree(n);  // (degree, node)
  for (int u = 0; u < n; ++u) by_degree[u] = {g.degree(u), u};
  std::sort(by_degree.begin(), by_degree.end());
  std::vector<int> pos_of(n);
  for (int i = 0; i < n; ++i) pos_of[by_degree[i].second] = i;

  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u) {
    int pos = pos_of[u];
    int lo = std::max(0, pos - budget_per_side);
    int hi = std::min(n - 1, pos + budget_per_side);
    for (int i = lo; i <= hi; ++i) {
      if (i == pos) continue;
      int v = by_degree[i].second;
      pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  ComputationGraph c;
  c.num_nodes = n;
  c.T = T;
  c.mode = "practical";
  c.budget_per_side = budget_per_side;
  c.weight_floor = opt.weight_floor;
  detail::fill_structural(g, T, opt, pairs, c);
  detail::fill_proximity(g, c);
  return c;
}

// --- serialization -----------------------------------------------------------
//
// TSV with one row per directed copy of each edge; rel is "0".."T" or "p".
// Metadata comment lines carry the build parameters. Weights are written with
// 12 significant digits.

inline void save_computation_graph(const ComputationGraph& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buf[64];
  out << "# strucmix computation graph\n";
  std::snprintf(buf, sizeof buf, "%.12g", c.weight_floor);
  out << "# nodes=" << c.num_nodes << " T=" << c.T << " mode=" << c.mode
      << " budget=" << c.budget_per_side << " floor=" << buf << "\n";
  out << "src\tdst\trel\tweight\n";
  auto emit = [&](int u, int v, const std::string& rel, double w) {
    std::snprintf(buf, sizeof buf, "%.12g", w);
    out << u << '\t' << v << '\t' << rel << '\t' << buf << '\n'
        << v << '\t' << u << '\t' << rel << '\t' << buf << '\n';
  };
  for (int tau = 0; tau <= c.T; ++tau) {
    std::string rel = std::to_string(tau);
    for (auto& e : c.structural[tau]) emit(e.u, e.v, rel, e.w);
  }
  for (auto& e : c.proximity) emit(e.u, e.v, "p", e.w);
}

inline ComputationGraph load_computation_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  ComputationGraph c;
  c.T = -1;
  bool saw_header_row = false;
  std::string line;
  long lineno = 0;
  // directed rows per relation; -1 = proximity
  std::map<int, std::vector<std::tuple<int, int, double>>> directed;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "nodes") c.num_nodes = std::stoi(val);
          else if (key == "T") c.T = std::stoi(val);
          else if (key == "mode") c.mode = val;
          else if (key == "budget") c.budget_per_side = std::stoi(val);
          else if (key == "floor") c.weight_floor = std::stod(val);
        } catch (const std::exception&) {
          throw ParseError(path, lineno, "bad metadata value in '" + tok + "'");
        }
      }
      continue;
    }
    if (!saw_header_row) {
      if (line != "src\tdst\trel\tweight")
        throw ParseError(path, lineno, "expected header row 'src\\tdst\\trel\\tweight'");
      saw_header_row = true;
      continue;
    }
    std::istringstream ss(line);
    long long u, v;
    std::string rel;
    double w;
    if (!(ss >> u >> v >> rel >> w))
      throw ParseError(path, lineno, "expected 'src dst rel weight'");
    if (u < 0 || v < 0) throw ParseError(path, lineno, "negative node id");
    int rel_id;
    if (rel == "p") {
      rel_id = -1;
    } else {
      try {
        rel_id = std::stoi(rel);
      } catch (const std::exception&) {
        throw ParseError(path, lineno, "unknown relation '" + rel + "'");
      }
      if (rel_id < 0) throw ParseError(path, lineno, "negative structural relation");
    }
    if (!(w > 0.0 && w <= 1.0 + 1e-12))
      throw ParseError(path, lineno, "edge weight outside (0,1]");
    directed[rel_id].emplace_back(static_cast<int>(u), static_cast<int>(v), w);
    c.num_nodes = std::max({c.num_nodes, static_cast<int>(u) + 1, static_cast<int>(v) + 1});
  }
  if (!saw_header_row) throw ParseError(path, lineno, "missing header row");
  for (auto& [rel_id, rows] : directed)
    if (rel_id >= 0) c.T = std::max(c.T, rel_id);
  c.structural.assign(c.T + 1, {});
  for (auto& [rel_id, rows] : directed) {
    std::sort(rows.begin(), rows.end());
    std::vector<RelEdge> canon;
    for (auto& [u, v, w] : rows) {
      if (u == v) throw DataError(path + ": self-edge in relation file");
      if (u < v) canon.push_back({u, v, w});
    }
    if (canon.size() * 2 != rows.size())
      throw DataError(path + ": unmatched directed edge copies in relation " +
                      (rel_id < 0 ? std::string("p") : std::to_string(rel_id)));
    for (auto& e : canon) {
      auto it = std::lower_bound(rows.begin(), rows.end(), std::tuple(e.v, e.u, 0.0));
      if (it == rows.end() || std::get<0>(*it) != e.v || std::get<1>(*it) != e.u ||
          std::get<2>(*it) != e.w)
        throw DataError(path + ": asymmetric edge (" + std::to_string(e.u) + "," +
                        std::to_string(e.v) + ")");
    }
    if (rel_id < 0)
      c.proximity = std::move(canon);
    else
      c.structural[rel_id] = std::move(canon);
  }
  return c;
}

// Collapses every relation into one weighted graph (weights summed per node
// pair, degrees become weighted degrees): the stated interpretation for
// recomputing local assortativity on the computation graph.
inline WalkGraph union_walk_graph(const ComputationGraph& c) {
  std::vector<std::tuple<int, int, double>> edges;
  for (auto& rel : c.structural)
    for (auto& e : rel) edges.emplace_back(e.u, e.v, e.w);
  for (auto& e : c.proximity) edges.emplace_back(e.u, e.v, e.w);
  std::sort(edges.begin(), edges.end(),
            [](auto& a, auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) <
                                           std::tie(std::get<0>(b), std::get<1>(b)); });
  std::vector<std::tuple<int, int, double>> merged;
  for (auto& [u, v, w] : edges) {
    if (!merged.empty() && std::get<0>(merged.back()) == u && std::get<1>(merged.back()) == v)
      std::get<2>(merged.back()) += w;
    else
      merged.emplace_back(u, v, w);
  }
  return WalkGraph::from_weighted_edges(c.num_nodes, merged);
}

// Local-assortativity distribution shift: how the nodes that were
// disassortative in G mix in the collapsed computation graph.
struct ShiftReport {
  std::vector<int> nodes;  // nodes with defined r_local < 0 in G
  std::vector<double> r_before, r_after;
  double mean_before = 0, mean_after = 0;
};

inline ShiftReport shift_report(const LabeledGraph& g, const ComputationGraph& c,
                                double tol = 1e-6, int threads = 1) {
  ShiftReport rep;
  auto before = assortativity_profile(g, tol, threads);
  auto union_graph = union_walk_graph(c);
  auto after = assortativity_profile(union_graph, g.labels(), g.num_classes(), tol, threads);
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (!before.r_local[u] || *before.r_local[u] >= 0) continue;
    if (!after.r_local[u]) continue;
    rep.nodes.push_back(u);
    rep.r_before.push_back(*before.r_local[u]);
    rep.r_after.push_back(*after.r_local[u]);
  }
  for (double x : rep.r_before) rep.mean_before += x;
  for (double x : rep.r_after) rep.mean_after += x;
  if (!rep.nodes.empty()) {
    rep.mean_before /= static_cast<double>(rep.nodes.size());
    rep.mean_after /= static_cast<double>(rep.nodes.size());
  }
  return rep;
}

}  // namespace strucmix
