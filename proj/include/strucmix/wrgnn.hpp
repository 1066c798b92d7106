#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strucmix/compgraph.hpp"
#include "strucmix/errors.hpp"
#include "strucmix/rng.hpp"

namespace strucmix {

// --- relational adjacency ------------------------------------------------

enum class RelationFilter { All, ProximityOnly, StructureOnly };

// Per-relation CSR over directed edges of the computation graph, in the form
// the message-passing layers consume.
struct RelationalGraph {
  struct Rel {
    std::vector<int> off;  // n+1
    std::vector<int> nbr;
    std::vector<double> w;
  };

  int num_nodes = 0;
  std::vector<std::string> names;
  std::vector<Rel> rels;

  static RelationalGraph from(const ComputationGraph& c,
                              RelationFilter filter = RelationFilter::All) {
    RelationalGraph rg;
    rg.num_nodes = c.num_nodes;
    auto add = [&](const std::vector<RelEdge>& edges, const std::string& name) {
      Rel r;
      r.off.assign(rg.num_nodes + 1, 0);
      for (auto& e : edges) {
        ++r.off[e.u + 1];
        ++r.off[e.v + 1];
      }
      for (int i = 0; i < rg.num_nodes; ++i) r.off[i + 1] += r.off[i];
      r.nbr.resize(edges.size() * 2);
      r.w.resize(edges.size() * 2);
      std::vector<int> cursor(r.off.begin(), r.off.end() - 1);
      for (auto& e : edges) {
        r.nbr[cursor[e.u]] = e.v;
        r.w[cursor[e.u]++] = e.w;
        r.nbr[cursor[e.v]] = e.u;
        r.w[cursor[e.v]++] = e.w;
      }
      rg.rels.push_back(std::move(r));
      rg.names.push_back(name);
    };
    if (filter != RelationFilter::ProximityOnly)
      for (int tau = 0; tau <= c.T; ++tau) add(c.structural[tau], std::to_string(tau));
    if (filter != RelationFilter::StructureOnly) add(c.proximity, "p");
    return rg;
  }

  int num_relations() const { return static_cast<int>(rels.size()); }
};

// One-hot bucketed-degree features for attribute-free graphs: 32 log-spaced
// buckets, bucket(d) = 0 for d=0, else min(31, 1 + floor(log2 d)).
inline std::vector<double> degree_bucket_features(const LabeledGraph& g, int* dim_out = nullptr) {
  constexpr int kBuckets = 32;
  std::vector<double> x(static_cast<std::size_t>(g.num_nodes()) * kBuckets, 0.0);
  for (int u = 0; u < g.num_nodes(); ++u) {
    int d = g.degree(u);
    int b = d == 0 ? 0 : std::min(kBuckets - 1, 1 + static_cast<int>(std::floor(std::log2(d))));
    x[static_cast<std::size_t>(u) * kBuckets + b] = 1.0;
  }
  if (dim_out) *dim_out = kBuckets;
  return x;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : logits) hi = std::max(hi, v);
  std::vector<double> out(logits.size());
  double total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

inline double leaky_relu(double x, double slope) { return x > 0 ? x : slope * x; }

// --- model -----------------------------------------------------------------

struct WrgnnConfig {
  int in_dim = 0;
  int hidden = 16;
  int mlp_hidden = 16;
  int num_classes = 0;
  int layers = 2;
  int num_relations = 0;
  bool attention = true;          // WRGAT when true, WRGCN when false
  bool shared_attention = false;  // one attention vector per layer instead of per relation
  double dropout = 0.0;           // applied to hidden states after each layer
  double leaky_slope = 0.2;
};

namespace detail {

// G[n x h] = X[n x d] * W[h x d]^T
inline void project(std::vector<double>& G, const std::vector<double>& X, const double* W, int n,
                    int d, int h) {
  G.assign(static_cast<std::size_t>(n) * h, 0.0);
  for (int u = 0; u < n; ++u) {
    const double* xu = X.data() + static_cast<std::size_t>(u) * d;
    double* gu = G.data() + static_cast<std::size_t>(u) * h;
    for (int j = 0; j < h; ++j) {
      const double* wj = W + static_cast<std::size_t>(j) * d;
      double acc = 0;
      for (int i = 0; i < d; ++i) acc += wj[i] * xu[i];
      gu[j] = acc;
    }
  }
}

// dW[h x d] += dG[n x h]^T * X[n x d]
inline void accum_weight_grad(double* dW, const std::vector<double>& dG,
                              const std::vector<double>& X, int n, int d, int h) {
  for (int u = 0; u < n; ++u) {
    const double* gu = dG.data() + static_cast<std::size_t>(u) * h;
    const double* xu = X.data() + static_cast<std::size_t>(u) * d;
    for (int j = 0; j < h; ++j) {
      if (gu[j] == 0.0) continue;
      double* wj = dW + static_cast<std::size_t>(j) * d;
      for (int i = 0; i < d; ++i) wj[i] += gu[j] * xu[i];
    }
  }
}

// dX[n x d] += dG[n x h] * W[h x d]
inline void accum_input_grad(std::vector<double>& dX, const std::vector<double>& dG,
                             const double* W, int n, int d, int h) {
  for (int u = 0; u < n; ++u) {
    const double* gu = dG.data() + static_cast<std::size_t>(u) * h;
    double* xu = dX.data() + static_cast<std::size_t>(u) * d;
    for (int j = 0; j < h; ++j) {
      if (gu[j] == 0.0) continue;
      const double* wj = W + static_cast<std::size_t>(j) * d;
      for (int i = 0; i < d; ++i) xu[i] += gu[j] * wj[i];
    }
  }
}

}  // namespace detail

// Intermediate state of one forward pass, kept for the backward pass and for
// inspection in tests (attention coefficients, per-layer hidden norms).
struct ForwardTrace {
  struct Layer {
    std::vector<std::vector<double>> G;       // [rel] n x h relation projections
    std::vector<std::vector<double>> elogit;  // [rel] raw attention logits per directed edge
    std::vector<std::vector<double>> alpha;   // [rel] attention weights per directed edge
    std::vector<double> M;                    // n x h aggregated messages
    std::vector<double> PRE;                  // n x h pre-activation
    std::vector<double> OUT;                  // n x h after ReLU + L2 normalization
    std::vector<double> H;                    // layer output fed forward (post-dropout)
    std::vector<double> inv_norm;             // n; 0 for all-zero activations
    std::vector<double> drop_scale;           // n x h; empty when dropout inactive
  };
  std::vector<Layer> layers;
  std::vector<double> A1, R1, LOGITS, P;  // classifier head intermediates
};

// Relation-aware message-passing classifier over a computation graph.
// Parameters live in one flat vector (layout below) so the optimizer and the
// finite-difference checks can treat the model as a plain parameter vector.
class WrgnnModel {
 public:
  explicit WrgnnModel(const WrgnnConfig& cfg) : cfg_(cfg) {
    if (cfg.in_dim <= 0 || cfg.num_classes <= 0 || cfg.num_relations <= 0)
      throw DataError("WrgnnConfig: in_dim, num_classes and num_relations must be positive");
    if (cfg.layers < 1) throw DataError("WrgnnConfig: need at least one layer");
    if (cfg.mlp_hidden < 1) throw DataError("WrgnnConfig: mlp_hidden must be positive");
    std::size_t off = 0;
    auto reserve = [&](int rows, int cols) {
      std::size_t o = off;
      off += static_cast<std::size_t>(rows) * cols;
      return o;
    };
    layer_off_.resize(cfg.layers);
    for (int k = 0; k < cfg.layers; ++k) {
      int d_in = layer_in_dim(k);
      auto& L = layer_off_[k];
      L.w_rel.resize(cfg.num_relations);
      for (int r = 0; r < cfg.num_relations; ++r) L.w_rel[r] = reserve(cfg.hidden, d_in);
      L.w_self = reserve(cfg.hidden, d_in);
      L.w_neig = reserve(cfg.hidden, cfg.hidden);
      if (cfg.attention) {
        int vectors = cfg.shared_attention ? 1 : cfg.num_relations;
        L.attn.resize(vectors);
        for (int r = 0; r < vectors; ++r) L.attn[r] = reserve(1, 2 * cfg.hidden);
      }
    }
    mlp_w1_ = reserve(cfg.mlp_hidden, cfg.hidden);
    mlp_b1_ = reserve(1, cfg.mlp_hidden);
    mlp_w2_ = reserve(cfg.num_classes, cfg.mlp_hidden);
    mlp_b2_ = reserve(1, cfg.num_classes);
    params_.assign(off, 0.0);
  }

  const WrgnnConfig& config() const { return cfg_; }
  std::size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix; attention
  // vectors use fan_in = 2*hidden; biases start at zero.
  void init_params(RngStream& rng) {
    std::fill(params_.begin(), params_.end(), 0.0);
    auto fill = [&](std::size_t off, int rows, int cols, int fan_in) {
      double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i)
        params_[off + i] = rng.uniform(-bound, bound);
    };
    for (int k = 0; k < cfg_.layers; ++k) {
      int d_in = layer_in_dim(k);
      auto& L = layer_off_[k];
      for (auto o : L.w_rel) fill(o, cfg_.hidden, d_in, d_in);
      fill(L.w_self, cfg_.hidden, d_in, d_in);
      fill(L.w_neig, cfg_.hidden, cfg_.hidden, cfg_.hidden);
      for (auto o : L.attn) fill(o, 1, 2 * cfg_.hidden, 2 * cfg_.hidden);
    }
    fill(mlp_w1_, cfg_.mlp_hidden, cfg_.hidden, cfg_.hidden);
    fill(mlp_w2_, cfg_.num_classes, cfg_.mlp_hidden, cfg_.mlp_hidden);
  }

  // Forward pass; returns per-node class probabilities (n x C, row-major).
  // When `training` is set and dropout > 0, hidden states are dropped using
  // `dropout_rng` (inverted dropout).
  std::vector<double> forward(const RelationalGraph& rg, const std::vector<double>& X,
                              ForwardTrace* trace = nullptr, bool training = false,
                              RngStream* dropout_rng = nullptr) const {
    int n = rg.num_nodes;
    if (rg.num_relations() != cfg_.num_relations)
      throw DataError("relation count mismatch between graph and model");
    if (static_cast<std::size_t>(n) * cfg_.in_dim != X.size())
      throw DataError("feature matrix dimension mismatch: expected " +
                      std::to_string(static_cast<std::size_t>(n) * cfg_.in_dim) + " values, got " +
                      std::to_string(X.size()));
    ForwardTrace local;
    ForwardTrace& t = trace ? *trace : local;
    t.layers.assign(cfg_.layers, {});
    int h = cfg_.hidden;

    const std::vector<double>* input = &X;
    for (int k = 0; k < cfg_.layers; ++k) {
      auto& L = t.layers[k];
      int d_in = layer_in_dim(k);
      L.G.resize(cfg_.num_relations);
      L.elogit.assign(cfg_.num_relations, {});
      L.alpha.assign(cfg_.num_relations, {});
      L.M.assign(static_cast<std::size_t>(n) * h, 0.0);

      for (int r = 0; r < cfg_.num_relations; ++r) {
        detail::project(L.G[r], *input, params_.data() + layer_off_[k].w_rel[r], n, d_in, h);
        const auto& rel = rg.rels[r];
        if (cfg_.attention) {
          const double* a = params_.data() + attn_offset(k, r);
          const double* a_self = a;
          const double* a_nbr = a + h;
          auto& elogit = L.elogit[r];
          auto& alpha = L.alpha[r];
          elogit.assign(rel.nbr.size(), 0.0);
          alpha.assign(rel.nbr.size(), 0.0);
          for (int u = 0; u < n; ++u) {
            int b = rel.off[u], e = rel.off[u + 1];
            if (b == e) continue;
            const double* gu = L.G[r].data() + static_cast<std::size_t>(u) * h;
            double self_term = 0;
            for (int j = 0; j < h; ++j) self_term += a_self[j] * gu[j];
            double hi = -std::numeric_limits<double>::infinity();
            for (int idx = b; idx < e; ++idx) {
              const double* gv = L.G[r].data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              double nbr_term = 0;
              for (int j = 0; j < h; ++j) nbr_term += a_nbr[j] * gv[j];
              elogit[idx] = self_term + nbr_term;
              hi = std::max(hi, leaky_relu(elogit[idx], cfg_.leaky_slope));
            }
            double total = 0;
            for (int idx = b; idx < e; ++idx) {
              alpha[idx] = std::exp(leaky_relu(elogit[idx], cfg_.leaky_slope) - hi);
              total += alpha[idx];
            }
            for (int idx = b; idx < e; ++idx) alpha[idx] /= total;
          }
        }
        // m_u += sum_v W_r h_v * w(u,v) * alpha(u,v)
        for (int u = 0; u < n; ++u) {
          double* mu = L.M.data() + static_cast<std::size_t>(u) * h;
          for (int idx = rel.off[u]; idx < rel.off[u + 1]; ++idx) {
            double c = rel.w[idx] * (cfg_.attention ? L.alpha[r][idx] : 1.0);
            const double* gv = L.G[r].data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
            for (int j = 0; j < h; ++j) mu[j] += c * gv[j];
          }
        }
      }

      // h'_u = relu(W_self h_u + W_neig m_u), then per-node L2 normalization
      detail::project(L.PRE, *input, params_.data() + layer_off_[k].w_self, n, d_in, h);
      {
        std::vector<double> neig;
        detail::project(neig, L.M, params_.data() + layer_off_[k].w_neig, n, h, h);
        for (std::size_t i = 0; i < L.PRE.size(); ++i) L.PRE[i] += neig[i];
      }
      L.OUT.assign(static_cast<std::size_t>(n) * h, 0.0);
      L.inv_norm.assign(n, 0.0);
      for (int u = 0; u < n; ++u) {
        const double* pre = L.PRE.data() + static_cast<std::size_t>(u) * h;
        double* out = L.OUT.data() + static_cast<std::size_t>(u) * h;
        double norm2 = 0;
        for (int j = 0; j < h; ++j) {
          double a = pre[j] > 0 ? pre[j] : 0.0;
          out[j] = a;
          norm2 += a * a;
        }
        if (norm2 > 0) {
          double inv = 1.0 / std::sqrt(norm2);
          L.inv_norm[u] = inv;
          for (int j = 0; j < h; ++j) out[j] *= inv;
        }
      }
      bool drop = training && cfg_.dropout > 0 && dropout_rng;
      if (drop) {
        L.drop_scale.assign(static_cast<std::size_t>(n) * h, 0.0);
        double keep = 1.0 - cfg_.dropout;
        L.H.assign(L.OUT.size(), 0.0);
        for (std::size_t i = 0; i < L.OUT.size(); ++i) {
          if (dropout_rng->uniform() < keep) {
            L.drop_scale[i] = 1.0 / keep;
            L.H[i] = L.OUT[i] * L.drop_scale[i];
          }
        }
      } else {
        L.H = L.OUT;
      }
      input = &t.layers[k].H;
    }

    // classifier head: softmax(MLP(z_u))
    const std::vector<double>& Z = t.layers.back().H;
    int mh = cfg_.mlp_hidden, C = cfg_.num_classes;
    detail::project(t.A1, Z, params_.data() + mlp_w1_, n, h, mh);
    const double* b1 = params_.data() + mlp_b1_;
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < mh; ++j) t.A1[static_cast<std::size_t>(u) * mh + j] += b1[j];
    t.R1 = t.A1;
    for (double& v : t.R1) v = v > 0 ? v : 0.0;
    detail::project(t.LOGITS, t.R1, params_.data() + mlp_w2_, n, mh, C);
    const double* b2 = params_.data() + mlp_b2_;
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < C; ++j) t.LOGITS[static_cast<std::size_t>(u) * C + j] += b2[j];
    t.P.assign(t.LOGITS.size(), 0.0);
    for (int u = 0; u < n; ++u) {
      auto row = softmax(std::span<const double>(t.LOGITS).subspan(
          static_cast<std::size_t>(u) * C, C));
      std::copy(row.begin(), row.end(), t.P.begin() + static_cast<std::size_t>(u) * C);
    }
    return t.P;
  }

  // Attention weights of node u under relation r at layer k, aligned with the
  // relation's CSR segment (empty when u has no r-neighbors).
  std::span<const double> attention_coefficients(const ForwardTrace& t, const RelationalGraph& rg,
                                                 int layer, int rel, int u) const {
    const auto& alpha = t.layers[layer].alpha[rel];
    if (alpha.empty()) return {};
    int b = rg.rels[rel].off[u], e = rg.rels[rel].off[u + 1];
    return std::span<const double>(alpha).subspan(b, e - b);
  }

  struct LossGrad {
    double loss = 0;
    std::vector<double> grad;
  };

  // Mean cross-entropy over the masked nodes plus an L2 penalty
  // 0.5 * weight_decay * ||theta||^2, with gradients for every parameter by
  // reverse-mode differentiation through the whole message-passing stack.
  LossGrad loss_and_gradients(const RelationalGraph& rg, const std::vector<double>& X,
                              const std::vector<int>& labels, const std::vector<int>& mask,
                              double weight_decay = 0.0, bool training = false,
                              RngStream* dropout_rng = nullptr) const {
    if (mask.empty()) throw DataError("loss requires a non-empty node mask");
    int n = rg.num_nodes, h = cfg_.hidden, C = cfg_.num_classes, mh = cfg_.mlp_hidden;
    ForwardTrace t;
    forward(rg, X, &t, training, dropout_rng);

    LossGrad out;
    out.grad.assign(params_.size(), 0.0);
    double inv_m = 1.0 / static_cast<double>(mask.size());
    for (int u : mask) {
      if (u < 0 || u >= n || labels[u] < 0) throw DataError("mask contains unlabeled node");
      double p = t.P[static_cast<std::size_t>(u) * C + labels[u]];
      out.loss -= std::log(std::max(p, 1e-300)) * inv_m;
    }

    // head backward
    std::vector<double> dLOGITS(static_cast<std::size_t>(n) * C, 0.0);
    for (int u : mask) {
      for (int j = 0; j < C; ++j)
        dLOGITS[static_cast<std::size_t>(u) * C + j] =
            (t.P[static_cast<std::size_t>(u) * C + j] - (labels[u] == j ? 1.0 : 0.0)) * inv_m;
    }
    double* db2 = out.grad.data() + mlp_b2_;
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < C; ++j) db2[j] += dLOGITS[static_cast<std::size_t>(u) * C + j];
    detail::accum_weight_grad(out.grad.data() + mlp_w2_, dLOGITS, t.R1, n, mh, C);
    std::vector<double> dR1(static_cast<std::size_t>(n) * mh, 0.0);
    detail::accum_input_grad(dR1, dLOGITS, params_.data() + mlp_w2_, n, mh, C);
    for (std::size_t i = 0; i < dR1.size(); ++i)
      if (t.A1[i] <= 0) dR1[i] = 0;
    double* db1 = out.grad.data() + mlp_b1_;
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < mh; ++j) db1[j] += dR1[static_cast<std::size_t>(u) * mh + j];
    const std::vector<double>& Z = t.layers.back().H;
    detail::accum_weight_grad(out.grad.data() + mlp_w1_, dR1, Z, n, h, mh);
    std::vector<double> dH(static_cast<std::size_t>(n) * h, 0.0);
    detail::accum_input_grad(dH, dR1, params_.data() + mlp_w1_, n, h, mh);

    // layers backward
    for (int k = cfg_.layers - 1; k >= 0; --k) {
      const auto& L = t.layers[k];
      int d_in = layer_in_dim(k);
      const std::vector<double>& H_in = k == 0 ? X : t.layers[k - 1].H;

      if (!L.drop_scale.empty())
        for (std::size_t i = 0; i < dH.size(); ++i) dH[i] *= L.drop_scale[i];

      // L2 normalization and ReLU
      std::vector<double> dPRE(static_cast<std::size_t>(n) * h, 0.0);
      for (int u = 0; u < n; ++u) {
        double inv = L.inv_norm[u];
        if (inv == 0.0) continue;
        const double* outv = L.OUT.data() + static_cast<std::size_t>(u) * h;
        const double* g = dH.data() + static_cast<std::size_t>(u) * h;
        const double* pre = L.PRE.data() + static_cast<std::size_t>(u) * h;
        double dot = 0;
        for (int j = 0; j < h; ++j) dot += outv[j] * g[j];
        double* dp = dPRE.data() + static_cast<std::size_t>(u) * h;
        for (int j = 0; j < h; ++j) {
          double da = (g[j] - outv[j] * dot) * inv;  // through x/||x||
          dp[j] = pre[j] > 0 ? da : 0.0;             // through relu
        }
      }

      std::vector<double> dH_prev(static_cast<std::size_t>(n) * d_in, 0.0);
      detail::accum_weight_grad(out.grad.data() + layer_off_[k].w_self, dPRE, H_in, n, d_in, h);
      detail::accum_input_grad(dH_prev, dPRE, params_.data() + layer_off_[k].w_self, n, d_in, h);

      std::vector<double> dM(static_cast<std::size_t>(n) * h, 0.0);
      detail::accum_weight_grad(out.grad.data() + layer_off_[k].w_neig, dPRE, L.M, n, h, h);
      detail::accum_input_grad(dM, dPRE, params_.data() + layer_off_[k].w_neig, n, h, h);

      for (int r = 0; r < cfg_.num_relations; ++r) {
        const auto& rel = rg.rels[r];
        std::vector<double> dG(static_cast<std::size_t>(n) * h, 0.0);
        if (cfg_.attention) {
          const double* a = params_.data() + attn_offset(k, r);
          const double* a_self = a;
          const double* a_nbr = a + h;
          double* da = out.grad.data() + attn_offset(k, r);
          double* da_self = da;
          double* da_nbr = da + h;
          const auto& alpha = L.alpha[r];
          const auto& elogit = L.elogit[r];
          for (int u = 0; u < n; ++u) {
            int b = rel.off[u], e = rel.off[u + 1];
            if (b == e) continue;
            const double* dmu = dM.data() + static_cast<std::size_t>(u) * h;
            // s_idx = d(loss)/d(alpha_idx); softmax backward needs the
            // alpha-weighted mean of s over the segment
            double s_mean = 0;
            std::vector<double> s(e - b);
            for (int idx = b; idx < e; ++idx) {
              const double* gv = L.G[r].data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              double dot = 0;
              for (int j = 0; j < h; ++j) dot += dmu[j] * gv[j];
              s[idx - b] = rel.w[idx] * dot;
              s_mean += alpha[idx] * s[idx - b];
              // direct path: dG[v] += w * alpha * dmu
              double c = rel.w[idx] * alpha[idx];
              double* dgv = dG.data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              for (int j = 0; j < h; ++j) dgv[j] += c * dmu[j];
            }
            const double* gu = L.G[r].data() + static_cast<std::size_t>(u) * h;
            double* dgu = dG.data() + static_cast<std::size_t>(u) * h;
            for (int idx = b; idx < e; ++idx) {
              double dtilde = alpha[idx] * (s[idx - b] - s_mean);
              double de = dtilde * (elogit[idx] > 0 ? 1.0 : cfg_.leaky_slope);
              if (de == 0.0) continue;
              const double* gv = L.G[r].data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              double* dgv = dG.data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              for (int j = 0; j < h; ++j) {
                da_self[j] += de * gu[j];
                da_nbr[j] += de * gv[j];
                dgu[j] += de * a_self[j];
                dgv[j] += de * a_nbr[j];
              }
            }
          }
        } else {
          for (int u = 0; u < n; ++u) {
            const double* dmu = dM.data() + static_cast<std::size_t>(u) * h;
            for (int idx = rel.off[u]; idx < rel.off[u + 1]; ++idx) {
              double* dgv = dG.data() + static_cast<std::size_t>(rel.nbr[idx]) * h;
              for (int j = 0; j < h; ++j) dgv[j] += rel.w[idx] * dmu[j];
            }
          }
        }
        detail::accum_weight_grad(out.grad.data() + layer_off_[k].w_rel[r], dG, H_in, n, d_in, h);
        detail::accum_input_grad(dH_prev, dG, params_.data() + layer_off_[k].w_rel[r], n, d_in, h);
      }
      dH.swap(dH_prev);
    }

    if (weight_decay > 0) {
      double pen = 0;
      for (std::size_t i = 0; i < params_.size(); ++i) {
        pen += params_[i] * params_[i];
        out.grad[i] += weight_decay * params_[i];
      }
      out.loss += 0.5 * weight_decay * pen;
    }
    return out;
  }

 private:
  int layer_in_dim(int k) const { return k == 0 ? cfg_.in_dim : cfg_.hidden; }
  std::size_t attn_offset(int k, int r) const {
    return layer_off_[k].attn[cfg_.shared_attention ? 0 : r];
  }

  struct LayerOffsets {
    std::vector<std::size_t> w_rel;
    std::size_t w_self = 0, w_neig = 0;
    std::vector<std::size_t> attn;
  };

  WrgnnConfig cfg_;
  std::vector<LayerOffsets> layer_off_;
  std::size_t mlp_w1_ = 0, mlp_b1_ = 0, mlp_w2_ = 0, mlp_b2_ = 0;
  std::vector<double> params_;
};

// --- training and evaluation -------------------------------------------------

struct SplitSet {
  std::vector<int> train, val, test;
};

struct TrainConfig {
  double lr = 0.01;
  double weight_decay = 5e-4;
  int max_epochs = 500;
  int patience = 100;  // early stopping on validation accuracy
  std::uint64_t seed = 1;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0, train_acc = 0, val_loss = 0, val_acc = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_acc = 0;
};

struct EvalResult {
  double accuracy = 0;
  double f1_micro = 0;
  std::vector<int> predicted;        // over all nodes
  std::vector<std::uint8_t> correct; // aligned with the mask
};

inline EvalResult evaluate(const WrgnnModel& model, const RelationalGraph& rg,
                           const std::vector<double>& X, const std::vector<int>& labels,
                           const std::vector<int>& mask) {
  if (mask.empty()) throw DataError("evaluate requires a non-empty mask");
  auto P = model.forward(rg, X);
  int C = model.config().num_classes;
  EvalResult res;
  res.predicted.assign(rg.num_nodes, -1);
  for (int u = 0; u < rg.num_nodes; ++u) {
    const double* row = P.data() + static_cast<std::size_t>(u) * C;
    res.predicted[u] = static_cast<int>(std::max_element(row, row + C) - row);
  }
  // micro-F1 from pooled per-class counts (equals accuracy for single-label
  // multiclass, computed from the definition regardless)
  long tp = 0, fp = 0, fn = 0, hits = 0;
  for (int u : mask) {
    bool ok = res.predicted[u] == labels[u];
    res.correct.push_back(ok ? 1 : 0);
    hits += ok;
    if (ok) {
      ++tp;
    } else {
      ++fp;
      ++fn;
    }
  }
  res.accuracy = static_cast<double>(hits) / static_cast<double>(mask.size());
  double denom = 2.0 * tp + fp + fn;
  res.f1_micro = denom > 0 ? 2.0 * tp / denom : 0.0;
  return res;
}

namespace detail {

inline double masked_ce(const std::vector<double>& P, const std::vector<int>& labels,
                        const std::vector<int>& mask, int C) {
  double loss = 0;
  for (int u : mask)
    loss -= std::log(std::max(P[static_cast<std::size_t>(u) * C + labels[u]], 1e-300));
  return loss / static_cast<double>(mask.size());
}

inline double masked_acc(const std::vector<double>& P, const std::vector<int>& labels,
                         const std::vector<int>& mask, int C) {
  long hits = 0;
  for (int u : mask) {
    const double* row = P.data() + static_cast<std::size_t>(u) * C;
    hits += (static_cast<int>(std::max_element(row, row + C) - row) == labels[u]);
  }
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

}  // namespace detail

// Adam training loop with early stopping; keeps the parameters of the epoch
// with the best validation accuracy. Fully deterministic given cfg.seed.
inline TrainResult train(WrgnnModel& model, const RelationalGraph& rg,
                         const std::vector<double>& X, const std::vector<int>& labels,
                         const SplitSet& split, const TrainConfig& cfg) {
  if (split.train.empty() || split.val.empty())
    throw DataError("training requires non-empty train and val masks");
  RngStream init_rng(cfg.seed, "init");
  RngStream dropout_rng(cfg.seed, "dropout");
  model.init_params(init_rng);

  auto& theta = model.params();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  TrainResult res;
  std::vector<double> best_params = theta;
  int C = model.config().num_classes;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto lg = model.loss_and_gradients(rg, X, labels, split.train, cfg.weight_decay,
                                       /*training=*/true, &dropout_rng);
    if (!std::isfinite(lg.loss))
      throw NumericalError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch));
    double bc1 = 1.0 - std::pow(beta1, epoch);
    double bc2 = 1.0 - std::pow(beta2, epoch);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = beta1 * m[i] + (1 - beta1) * lg.grad[i];
      v[i] = beta2 * v[i] + (1 - beta2) * lg.grad[i] * lg.grad[i];
      theta[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }

    auto P = model.forward(rg, X);
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = lg.loss;
    st.train_acc = detail::masked_acc(P, labels, split.train, C);
    st.val_loss = detail::masked_ce(P, labels, split.val, C);
    st.val_acc = detail::masked_acc(P, labels, split.val, C);
    res.history.push_back(st);

    if (res.best_epoch < 0 || st.val_acc > res.best_val_acc) {
      res.best_val_acc = st.val_acc;
      res.best_epoch = epoch;
      best_params = theta;
    }
    if (epoch - res.best_epoch >= cfg.patience) break;
  }
  theta = best_params;
  return res;
}

}  // namespace strucmix
