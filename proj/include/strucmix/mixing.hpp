#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "strucmix/errors.hpp"
#include "strucmix/graph.hpp"
#include "strucmix/parallel.hpp"

namespace strucmix {

// Row-stochastic random-walk view of a (possibly weighted) undirected graph.
// Transition probability is edge weight over weighted degree; the stationary
// distribution of the walk is strength/total_strength per component.
struct WalkGraph {
  int n = 0;
  std::vector<int> offsets{0};
  std::vector<int> nbr;
  std::vector<double> weight;    // parallel to nbr, > 0
  std::vector<double> strength;  // weighted degree

  static WalkGraph from_graph(const LabeledGraph& g) {
    WalkGraph w;
    w.n = g.num_nodes();
    w.offsets.assign(w.n + 1, 0);
    for (auto& [u, v] : g.edges()) {
      ++w.offsets[u + 1];
      ++w.offsets[v + 1];
    }
    for (int i = 0; i < w.n; ++i) w.offsets[i + 1] += w.offsets[i];
    w.nbr.resize(g.edges().size() * 2);
    w.weight.assign(g.edges().size() * 2, 1.0);
    std::vector<int> cursor(w.offsets.begin(), w.offsets.end() - 1);
    for (auto& [u, v] : g.edges()) {
      w.nbr[cursor[u]++] = v;
      w.nbr[cursor[v]++] = u;
    }
    w.strength.assign(w.n, 0.0);
    for (int u = 0; u < w.n; ++u) w.strength[u] = static_cast<double>(w.offsets[u + 1] - w.offsets[u]);
    return w;
  }

  // Builder for weighted graphs; edges must be given once per unordered pair.
  static WalkGraph from_weighted_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
    WalkGraph w;
    w.n = n;
    w.offsets.assign(n + 1, 0);
    for (auto& [u, v, x] : edges) {
      (void)x;
      ++w.offsets[u + 1];
      ++w.offsets[v + 1];
    }
    for (int i = 0; i < n; ++i) w.offsets[i + 1] += w.offsets[i];
    w.nbr.resize(edges.size() * 2);
    w.weight.resize(edges.size() * 2);
    std::vector<int> cursor(w.offsets.begin(), w.offsets.end() - 1);
    for (auto& [u, v, x] : edges) {
      w.nbr[cursor[u]] = v;
      w.weight[cursor[u]++] = x;
      w.nbr[cursor[v]] = u;
      w.weight[cursor[v]++] = x;
    }
    w.strength.assign(n, 0.0);
    for (int u = 0; u < n; ++u)
      for (int e = w.offsets[u]; e < w.offsets[u + 1]; ++e) w.strength[u] += w.weight[e];
    return w;
  }

  std::vector<int> component(int l) const {
    std::vector<int> stack{l}, comp;
    std::vector<char> seen(n, 0);
    seen[l] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int e = offsets[u]; e < offsets[u + 1]; ++e)
        if (!seen[nbr[e]]) {
          seen[nbr[e]] = 1;
          stack.push_back(nbr[e]);
        }
    }
    return comp;
  }

  // y = P^T x, i.e. one step of the walk distribution.
  void step(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int u = 0; u < n; ++u) {
      if (x[u] == 0.0 || strength[u] <= 0.0) continue;
      double scale = x[u] / strength[u];
      for (int e = offsets[u]; e < offsets[u + 1]; ++e) y[nbr[e]] += scale * weight[e];
    }
  }
};

// C x C matrix of label-pair edge mass fractions; entries sum to 1 for the
// global matrix.
struct MixingMatrix {
  int num_classes = 0;
  std::vector<double> e;  // row-major

  explicit MixingMatrix(int c = 0) : num_classes(c), e(static_cast<std::size_t>(c) * c, 0.0) {}
  double& at(int g, int h) { return e[static_cast<std::size_t>(g) * num_classes + h]; }
  double at(int g, int h) const { return e[static_cast<std::size_t>(g) * num_classes + h]; }

  double sum() const {
    double s = 0;
    for (double x : e) s += x;
    return s;
  }
  double trace() const {
    double s = 0;
    for (int g = 0; g < num_classes; ++g) s += at(g, g);
    return s;
  }
  std::vector<double> row_marginals() const {
    std::vector<double> a(num_classes, 0.0);
    for (int g = 0; g < num_classes; ++g)
      for (int h = 0; h < num_classes; ++h) a[g] += at(g, h);
    return a;
  }
  std::vector<double> col_marginals() const {
    std::vector<double> b(num_classes, 0.0);
    for (int g = 0; g < num_classes; ++g)
      for (int h = 0; h < num_classes; ++h) b[h] += at(g, h);
    return b;
  }
};

// Probability distribution over nodes, centered at a seed node; support is
// contained in the seed's connected component.
struct NodeWeightVector {
  int center = 0;
  std::vector<double> w;
};

// M[g][h] = fraction of directed edge mass between labels g and h, over edges
// whose both endpoints are labeled.
inline MixingMatrix global_mixing_matrix(const WalkGraph& wg, const std::vector<int>& labels,
                                         int num_classes) {
  MixingMatrix m(num_classes);
  double total = 0;
  for (int u = 0; u < wg.n; ++u) {
    if (labels[u] < 0) continue;
    for (int e = wg.offsets[u]; e < wg.offsets[u + 1]; ++e) {
      int v = wg.nbr[e];
      if (labels[v] < 0) continue;
      m.at(labels[u], labels[v]) += wg.weight[e];
      total += wg.weight[e];
    }
  }
  if (total <= 0) throw DataError("empty mixing matrix: no edge with both endpoints labeled");
  for (double& x : m.e) x /= total;
  return m;
}

inline MixingMatrix global_mixing_matrix(const LabeledGraph& g) {
  return global_mixing_matrix(WalkGraph::from_graph(g), g.labels(), g.num_classes());
}

inline double global_assortativity(const MixingMatrix& m) {
  auto a = m.row_marginals();
  auto b = m.col_marginals();
  double ab = 0;
  for (int g = 0; g < m.num_classes; ++g) ab += a[g] * b[g];
  double denom = 1.0 - ab;
  if (denom <= 1e-12)
    throw NumericalError("assortativity undefined: single-label edge mass");
  return (m.trace() - ab) / denom;
}

inline double global_assortativity(const LabeledGraph& g) {
  return global_assortativity(global_mixing_matrix(g));
}

// Personalized PageRank: fixed point of w = (1-alpha) e_l + alpha w^T P,
// where the walker restarts at l with probability 1-alpha. alpha=1 is the
// restart-free stationary distribution over l's component.
inline NodeWeightVector ppr_weights(const WalkGraph& wg, int l, double alpha,
                                    double residual_tol = 1e-10) {
  if (l < 0 || l >= wg.n) throw DataError("seed node out of range");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0,1]");
  NodeWeightVector out{l, std::vector<double>(wg.n, 0.0)};
  if (alpha == 0.0) {
    out.w[l] = 1.0;
    return out;
  }
  auto comp = wg.component(l);
  double comp_strength = 0;
  for (int u : comp) comp_strength += wg.strength[u];
  if (comp_strength <= 0)
    throw NumericalError("personalized PageRank undefined: seed component has no edges");
  if (alpha == 1.0) {
    for (int u : comp) out.w[u] = wg.strength[u] / comp_strength;
    return out;
  }
  std::vector<double> x(wg.n, 0.0), px;
  x[l] = 1.0;
  for (;;) {
    wg.step(x, px);
    for (int u = 0; u < wg.n; ++u) px[u] *= alpha;
    px[l] += 1.0 - alpha;
    double residual = 0;
    for (int u = 0; u < wg.n; ++u) residual += std::abs(px[u] - x[u]);
    x.swap(px);
    if (residual < residual_tol) break;
  }
  out.w = std::move(x);
  return out;
}

inline NodeWeightVector ppr_weights(const LabeledGraph& g, int l, double alpha,
                                    double residual_tol = 1e-10) {
  return ppr_weights(WalkGraph::from_graph(g), l, alpha, residual_tol);
}

// TotalRank weights: the PPR vector averaged over alpha in [0,1], which gives
// the series sum_k (e_l^T P^k) / ((k+1)(k+2)). The series is truncated at the
// smallest K with 1/(K+2) < tol (the remaining mass bound) and renormalized.
//
// Walk distributions converge (or 2-cycle, on bipartite components) long
// before K for any reasonable tol, so once x_k stabilizes in the 2-step sense
// the remaining terms are folded in analytically via parity-split coefficient
// sums instead of further matrix powers.
inline NodeWeightVector totalrank_weights(const WalkGraph& wg, int l, double tol = 1e-6) {
  if (l < 0 || l >= wg.n) throw DataError("seed node out of range");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  long long K = static_cast<long long>(std::ceil(1.0 / tol)) - 2;
  while (1.0 / static_cast<double>(K + 2) >= tol) ++K;
  if (K < 0) K = 0;

  auto coef = [](long long k) {
    return 1.0 / (static_cast<double>(k + 1) * static_cast<double>(k + 2));
  };

  std::vector<double> acc(wg.n, 0.0);
  std::vector<double> x(wg.n, 0.0), prev, prev2, next;
  x[l] = 1.0;
  constexpr double kFixEps = 1e-13;
  long long k = 0;
  for (;;) {
    for (int u = 0; u < wg.n; ++u) acc[u] += coef(k) * x[u];
    bool settled = false;
    if (k >= 2) {
      double diff = 0;
      for (int u = 0; u < wg.n; ++u) diff += std::abs(x[u] - prev2[u]);
      settled = diff < kFixEps;
    }
    if (k == K) break;
    if (settled) {
      // terms k+1..K alternate between P^T x (parity opposite to k) and x
      double s_same = 0, s_other = 0;
      long long cap = std::min(K, k + 4'000'000LL);
      for (long long j = k + 1; j <= cap; ++j)
        ((j - k) % 2 == 0 ? s_same : s_other) += coef(j);
      if (cap < K) {
        // residual coefficients are ~1e-14 each; an even split is exact to
        // far below any usable tol
        double rest = 1.0 / static_cast<double>(cap + 2) - 1.0 / static_cast<double>(K + 2);
        s_same += rest / 2;
        s_other += rest / 2;
      }
      wg.step(x, next);
      for (int u = 0; u < wg.n; ++u) acc[u] += s_same * x[u] + s_other * next[u];
      break;
    }
    prev2.swap(prev);
    prev = x;
    wg.step(x, next);
    x.swap(next);
    ++k;
  }

  double total = 0;
  for (double v : acc) total += v;
  if (total <= 0) throw NumericalError("TotalRank weights vanished");
  for (double& v : acc) v /= total;
  return NodeWeightVector{l, std::move(acc)};
}

inline NodeWeightVector totalrank_weights(const LabeledGraph& g, int l, double tol = 1e-6) {
  return totalrank_weights(WalkGraph::from_graph(g), l, tol);
}

// Mixing matrix seen by a walk distribution w: M_gh = sum_{i:g,j:h} w_i P_ij,
// symmetrized to (M + M^T)/2 for undirected semantics.
inline MixingMatrix local_mixing_matrix(const WalkGraph& wg, const std::vector<int>& labels,
                                        int num_classes, const NodeWeightVector& w) {
  MixingMatrix m(num_classes);
  double mass = 0;
  for (int u = 0; u < wg.n; ++u) {
    if (w.w[u] == 0.0 || wg.strength[u] <= 0.0) continue;
    double scale = w.w[u] / wg.strength[u];
    if (labels[u] < 0) continue;
    for (int e = wg.offsets[u]; e < wg.offsets[u + 1]; ++e) {
      int v = wg.nbr[e];
      if (labels[v] < 0) continue;
      m.at(labels[u], labels[v]) += scale * wg.weight[e];
      mass += scale * wg.weight[e];
    }
  }
  if (mass <= 0) throw DataError("local mixing matrix is empty: no labeled edge mass");
  for (int g = 0; g < num_classes; ++g)
    for (int h = 0; h < g; ++h) {
      double s = (m.at(g, h) + m.at(h, g)) / 2;
      m.at(g, h) = m.at(h, g) = s;
    }
  return m;
}

inline MixingMatrix local_mixing_matrix(const LabeledGraph& g, const NodeWeightVector& w) {
  return local_mixing_matrix(WalkGraph::from_graph(g), g.labels(), g.num_classes(), w);
}

namespace detail {

// Shared denominator state for per-node assortativity: global marginals.
struct AssortativityContext {
  std::vector<double> a;
  double sum_ab = 0;
  double denom = 0;

  explicit AssortativityContext(const MixingMatrix& global) {
    a = global.row_marginals();
    auto b = global.col_marginals();
    for (std::size_t g = 0; g < a.size(); ++g) sum_ab += a[g] * b[g];
    denom = 1.0 - sum_ab;
  }
};

// True when the seed's component carries any edge mass with both endpoints
// labeled; without it the local mixing matrix does not exist.
inline bool component_has_labeled_edge(const WalkGraph& wg, const std::vector<int>& labels,
                                       int l) {
  for (int u : wg.component(l)) {
    if (labels[u] < 0) continue;
    for (int e = wg.offsets[u]; e < wg.offsets[u + 1]; ++e)
      if (labels[wg.nbr[e]] >= 0) return true;
  }
  return false;
}

}  // namespace detail

// Local assortativity r_local(l): the global assortativity formula evaluated
// on the TotalRank-weighted local mixing matrix, with marginals taken from the
// global mixing matrix. Returns nullopt when the value is undefined for l:
// unlabeled seed, no labeled edge mass in the seed's component (e.g. isolated
// nodes), or single-label edge mass globally (degenerate denominator). A node
// whose component is single-label but whose graph is not scores 1, the
// numerator-equals-denominator case.
inline std::optional<double> local_assortativity_with(const WalkGraph& wg,
                                                      const std::vector<int>& labels,
                                                      int num_classes,
                                                      const detail::AssortativityContext& ctx,
                                                      const NodeWeightVector& w) {
  int l = w.center;
  if (labels[l] < 0) return std::nullopt;
  if (ctx.denom <= 1e-12) return std::nullopt;
  if (!detail::component_has_labeled_edge(wg, labels, l)) return std::nullopt;
  MixingMatrix m = local_mixing_matrix(wg, labels, num_classes, w);
  return (m.trace() - ctx.sum_ab) / ctx.denom;
}

inline std::optional<double> local_assortativity(const WalkGraph& wg,
                                                 const std::vector<int>& labels, int num_classes,
                                                 int l, double tol = 1e-6) {
  if (l < 0 || l >= wg.n) throw DataError("seed node out of range");
  if (labels[l] < 0) return std::nullopt;
  if (!detail::component_has_labeled_edge(wg, labels, l)) return std::nullopt;
  detail::AssortativityContext ctx(global_mixing_matrix(wg, labels, num_classes));
  return local_assortativity_with(wg, labels, num_classes, ctx, totalrank_weights(wg, l, tol));
}

inline std::optional<double> local_assortativity(const LabeledGraph& g, int l, double tol = 1e-6) {
  return local_assortativity(WalkGraph::from_graph(g), g.labels(), g.num_classes(), l, tol);
}

// Fraction of u's labeled neighbors sharing u's label (Neighbourhood Label
// Smoothness, estimated empirically).
inline std::optional<double> label_smoothness(const LabeledGraph& g, int u) {
  if (!g.has_label(u)) return std::nullopt;
  int same = 0, labeled = 0;
  for (int v : g.neighbors(u)) {
    if (!g.has_label(v)) continue;
    ++labeled;
    if (g.label(v) == g.label(u)) ++same;
  }
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(same) / labeled;
}

// Squared distance between u's features and its neighborhood mean
// (Neighbourhood Feature Smoothness).
inline std::optional<double> feature_smoothness(const LabeledGraph& g, int u) {
  if (!g.has_features() || g.degree(u) == 0) return std::nullopt;
  int d = g.feature_dim();
  std::vector<double> mean(d, 0.0);
  for (int v : g.neighbors(u)) {
    auto f = g.features(v);
    for (int i = 0; i < d; ++i) mean[i] += f[i];
  }
  double inv = 1.0 / g.degree(u);
  auto fu = g.features(u);
  double s = 0;
  for (int i = 0; i < d; ++i) {
    double diff = fu[i] - mean[i] * inv;
    s += diff * diff;
  }
  return s;
}

struct AssortativityProfile {
  static constexpr int kBins = 41;  // uniform over [-1, 1]

  std::vector<std::optional<double>> r_local;
  double r_global = 0;
  std::array<long, kBins> histogram{};

  static int bin_of(double r) {
    int b = static_cast<int>(std::floor((r + 1.0) / 2.0 * kBins));
    return std::clamp(b, 0, kBins - 1);
  }
};

inline AssortativityProfile assortativity_profile(const WalkGraph& wg,
                                                  const std::vector<int>& labels, int num_classes,
                                                  double tol = 1e-6, int threads = 1) {
  AssortativityProfile p;
  MixingMatrix global = global_mixing_matrix(wg, labels, num_classes);
  p.r_global = global_assortativity(global);
  detail::AssortativityContext ctx(global);
  p.r_local.assign(wg.n, std::nullopt);
  parallel_for(wg.n, threads, [&](std::size_t u) {
    int l = static_cast<int>(u);
    if (labels[l] < 0) return;
    if (!detail::component_has_labeled_edge(wg, labels, l)) return;
    p.r_local[l] =
        local_assortativity_with(wg, labels, num_classes, ctx, totalrank_weights(wg, l, tol));
  });
  for (auto& r : p.r_local)
    if (r) ++p.histogram[AssortativityProfile::bin_of(*r)];
  return p;
}

inline AssortativityProfile assortativity_profile(const LabeledGraph& g, double tol = 1e-6,
                                                  int threads = 1) {
  return assortativity_profile(WalkGraph::from_graph(g), g.labels(), g.num_classes(), tol,
                               threads);
}

}  // namespace strucmix
