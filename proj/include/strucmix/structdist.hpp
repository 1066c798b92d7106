#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "strucmix/dtw.hpp"
#include "strucmix/graph.hpp"

namespace strucmix {

// Non-increasing sequence of original-graph degrees over a node set.
struct DegreeSequence {
  std::vector<double> values;

  bool empty() const { return values.empty(); }
};

struct StructOptions {
  // degree sequences are clipped to this many largest entries; bounds DTW
  // cost on hub-heavy rings
  int max_sequence_len = 128;
  dtw::DtwOptions dtw;
};

inline DegreeSequence degree_sequence_of(const LabeledGraph& g, std::span<const int> ring_members,
                                         int max_len = 128) {
  DegreeSequence s;
  s.values.reserve(ring_members.size());
  for (int v : ring_members) s.values.push_back(static_cast<double>(g.degree(v)));
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  if (max_len > 0 && static_cast<int>(s.values.size()) > max_len) s.values.resize(max_len);
  return s;
}

inline DegreeSequence degree_sequence(const LabeledGraph& g, int center, int tau,
                                      int max_len = 128) {
  return degree_sequence_of(g, g.hop_ring(center, tau).members, max_len);
}

// Precomputed per-node degree sequences for hop levels 0..T; one BFS per node,
// shared across all pair computations of a build.
class DegreeSequenceCache {
 public:
  DegreeSequenceCache(const LabeledGraph& g, int T, const StructOptions& opt = {})
      : graph_(g), T_(T), opt_(opt), seqs_(g.num_nodes()) {}

  const std::vector<DegreeSequence>& for_node(int u) const {
    auto& entry = seqs_[u];
    if (entry.empty()) {
      auto rings = graph_.hop_rings_up_to(u, T_);
      entry.reserve(T_ + 1);
      for (int tau = 0; tau <= T_; ++tau)
        entry.push_back(degree_sequence_of(graph_, rings[tau], opt_.max_sequence_len));
    }
    return entry;
  }

  // Eager fill (parallel-friendly deterministic alternative to lazy access).
  void warm(int u) const { for_node(u); }

  const LabeledGraph& graph() const { return graph_; }
  int T() const { return T_; }
  const StructOptions& options() const { return opt_; }

 private:
  const LabeledGraph& graph_;
  int T_;
  StructOptions opt_;
  mutable std::vector<std::vector<DegreeSequence>> seqs_;
};

// Cumulative structural distance f_tau for tau = 0..T. The recursion stops at
// the first level where either hop ring is empty; those levels are absent.
struct DistanceRow {
  std::vector<std::optional<double>> f;
};

inline DistanceRow structural_distances(const DegreeSequenceCache& cache, int g, int h) {
  const auto& sg = cache.for_node(g);
  const auto& sh = cache.for_node(h);
  DistanceRow row;
  row.f.assign(cache.T() + 1, std::nullopt);
  double acc = 0;
  for (int tau = 0; tau <= cache.T(); ++tau) {
    if (sg[tau].empty() || sh[tau].empty()) break;
    acc += dtw::dtw_cost(sg[tau].values, sh[tau].values, cache.options().dtw);
    row.f[tau] = acc;
  }
  return row;
}

inline DistanceRow structural_distances(const LabeledGraph& graph, int g, int h, int T,
                                        const StructOptions& opt = {}) {
  DegreeSequenceCache cache(graph, T, opt);
  return structural_distances(cache, g, h);
}

}  // namespace strucmix
