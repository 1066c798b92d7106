#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strucmix/errors.hpp"

namespace strucmix {

// Nodes at exactly `tau` hops from `center`.
struct HopRing {
  int center = 0;
  int tau = 0;
  std::vector<int> members;  // sorted ascending
};

// Undirected simple graph with optional per-node class labels and dense
// feature rows. Immutable after construction; all queries are pure and safe
// to call concurrently.
//
// Input edges are symmetrized and deduplicated, self-loops are dropped.
// A missing label is stored as -1. Feature rows not present in the input are
// zero-filled.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  LabeledGraph(int num_nodes, std::vector<std::pair<int, int>> edges,
               std::vector<int> labels = {}, std::vector<double> features = {},
               int feature_dim = -1) {
    build(num_nodes, std::move(edges), std::move(labels), std::move(features),
          feature_dim);
  }

  int num_nodes() const { return n_; }
  long num_edges() const { return static_cast<long>(edges_.size()); }

  // Canonical edge list: u < v, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  std::span<const int> neighbors(int u) const {
    check_node(u);
    return {adj_.data() + offsets_[u],
            static_cast<std::size_t>(offsets_[u + 1] - offsets_[u])};
  }

  int degree(int u) const {
    check_node(u);
    return offsets_[u + 1] - offsets_[u];
  }

  bool has_labels() const { return num_classes_ > 0; }
  int num_classes() const { return num_classes_; }
  bool has_label(int u) const { return check_node(u), labels_[u] >= 0; }
  int label(int u) const { return check_node(u), labels_[u]; }
  const std::vector<int>& labels() const { return labels_; }

  bool has_features() const { return feat_dim_ >= 0; }
  int feature_dim() const { return feat_dim_; }
  std::span<const double> features(int u) const {
    check_node(u);
    if (feat_dim_ < 0) throw DataError("graph has no features");
    return {features_.data() + static_cast<std::size_t>(u) * feat_dim_,
            static_cast<std::size_t>(feat_dim_)};
  }
  const std::vector<double>& feature_matrix() const { return features_; }

  HopRing hop_ring(int u, int tau) const {
    check_node(u);
    HopRing ring{u, tau, {}};
    if (tau == 0) {
      ring.members = {u};
      return ring;
    }
    auto dist = bfs_distances(u, tau);
    for (int v = 0; v < n_; ++v)
      if (dist[v] == tau) ring.members.push_back(v);
    return ring;
  }

  // rings[t] holds the exact t-hop shell, t = 0..max_tau. One BFS pass.
  std::vector<std::vector<int>> hop_rings_up_to(int u, int max_tau) const {
    check_node(u);
    std::vector<std::vector<int>> rings(max_tau + 1);
    auto dist = bfs_distances(u, max_tau);
    for (int v = 0; v < n_; ++v)
      if (dist[v] >= 0) rings[dist[v]].push_back(v);
    return rings;
  }

  std::vector<int> connected_component(int u) const {
    check_node(u);
    auto dist = bfs_distances(u, -1);
    std::vector<int> comp;
    for (int v = 0; v < n_; ++v)
      if (dist[v] >= 0) comp.push_back(v);
    return comp;
  }

  bool operator==(const LabeledGraph& o) const {
    return n_ == o.n_ && edges_ == o.edges_ && labels_ == o.labels_ &&
           feat_dim_ == o.feat_dim_ && features_ == o.features_;
  }

  // --- file I/O -------------------------------------------------------------

  struct EdgeRows {
    std::vector<std::pair<int, int>> edges;
    int max_id = -1;
    long self_loops = 0;
  };

  static EdgeRows load_edge_rows(const std::string& edge_path) {
    EdgeRows out;
    for_each_data_line(edge_path, [&](const std::string& line, long lineno) {
      std::istringstream ss(line);
      long long u, v;
      if (!(ss >> u >> v)) throw ParseError(edge_path, lineno, "expected 'u v' pair");
      std::string extra;
      if (ss >> extra) throw ParseError(edge_path, lineno, "trailing tokens after edge");
      if (u < 0 || v < 0) throw ParseError(edge_path, lineno, "negative node id");
      if (u == v) {
        ++out.self_loops;
        out.max_id = std::max(out.max_id, static_cast<int>(u));
        return;
      }
      out.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
      out.max_id = std::max({out.max_id, static_cast<int>(u), static_cast<int>(v)});
    });
    return out;
  }

  // "u label_id" rows
  static std::vector<std::pair<int, int>> load_label_rows(const std::string& path) {
    std::vector<std::pair<int, int>> rows;
    for_each_data_line(path, [&](const std::string& line, long lineno) {
      std::istringstream ss(line);
      long long u, y;
      if (!(ss >> u >> y)) throw ParseError(path, lineno, "expected 'u label'");
      if (u < 0) throw ParseError(path, lineno, "negative node id");
      if (y < 0) throw ParseError(path, lineno, "negative label id");
      rows.emplace_back(static_cast<int>(u), static_cast<int>(y));
    });
    return rows;
  }

  struct FeatureRows {
    std::vector<std::pair<int, std::vector<double>>> rows;
    int dim = -1;
  };

  // "u f_1 ... f_d" rows, d fixed by the first row
  static FeatureRows load_feature_rows(const std::string& path) {
    FeatureRows out;
    for_each_data_line(path, [&](const std::string& line, long lineno) {
      std::istringstream ss(line);
      long long u;
      if (!(ss >> u)) throw ParseError(path, lineno, "expected node id");
      if (u < 0) throw ParseError(path, lineno, "negative node id");
      std::vector<double> row;
      double x;
      while (ss >> x) row.push_back(x);
      if (!ss.eof()) throw ParseError(path, lineno, "non-numeric feature value");
      if (out.dim < 0)
        out.dim = static_cast<int>(row.size());
      else if (static_cast<int>(row.size()) != out.dim)
        throw ParseError(path, lineno,
                         "feature dimension mismatch: expected " + std::to_string(out.dim) +
                             ", got " + std::to_string(row.size()));
      out.rows.emplace_back(static_cast<int>(u), std::move(row));
    });
    return out;
  }

  // Edge list: one "u v" pair per line, '#' comment lines ignored. Labels:
  // "u label_id" per line. Features: "u f_1 ... f_d", d inferred from the
  // first row. Node ids seen only in the label/feature files extend the node
  // count. Self-loops are dropped with a warning on `warn` when given.
  static LabeledGraph load(const std::string& edge_path,
                           const std::optional<std::string>& label_path = {},
                           const std::optional<std::string>& feature_path = {},
                           std::ostream* warn = nullptr) {
    auto edge_rows = load_edge_rows(edge_path);
    auto& edges = edge_rows.edges;
    int max_id = edge_rows.max_id;
    if (edge_rows.self_loops > 0 && warn)
      *warn << "warning: dropped " << edge_rows.self_loops << " self-loop(s) from "
            << edge_path << "\n";

    std::vector<std::pair<int, int>> label_rows;
    if (label_path) {
      label_rows = load_label_rows(*label_path);
      for (auto& [u, y] : label_rows) max_id = std::max(max_id, u);
    }

    std::vector<std::pair<int, std::vector<double>>> feature_rows;
    int dim = -1;
    if (feature_path) {
      auto fr = load_feature_rows(*feature_path);
      dim = fr.dim;
      feature_rows = std::move(fr.rows);
      for (auto& [u, row] : feature_rows) max_id = std::max(max_id, u);
    }

    int n = max_id + 1;
    std::vector<int> labels;
    if (label_path) {
      labels.assign(n, -1);
      for (auto& [u, y] : label_rows) labels[u] = y;
    }
    std::vector<double> features;
    if (feature_path && dim >= 0) {
      features.assign(static_cast<std::size_t>(n) * dim, 0.0);
      for (auto& [u, row] : feature_rows)
        std::copy(row.begin(), row.end(),
                  features.begin() + static_cast<std::size_t>(u) * dim);
    }
    LabeledGraph g;
    g.build(n, std::move(edges), std::move(labels), std::move(features), dim);
    return g;
  }

  void save_edge_list(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    for (auto& [u, v] : edges_) out << u << " " << v << "\n";
  }

  void save_labels(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    for (int u = 0; u < n_; ++u)
      if (labels_[u] >= 0) out << u << " " << labels_[u] << "\n";
  }

  void save_features(const std::string& path) const {
    if (feat_dim_ < 0) throw DataError("graph has no features");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    char buf[32];
    for (int u = 0; u < n_; ++u) {
      out << u;
      for (double x : features(u)) {
        std::snprintf(buf, sizeof buf, "%.12g", x);
        out << ' ' << buf;
      }
      out << "\n";
    }
  }

 private:
  void build(int num_nodes, std::vector<std::pair<int, int>> edges,
             std::vector<int> labels, std::vector<double> features,
             int feature_dim) {
    n_ = num_nodes;
    for (auto& [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw DataError("edge endpoint out of range");
      if (u == v) throw DataError("self-loop in edge set");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    offsets_.assign(n_ + 1, 0);
    for (auto& [u, v] : edges_) {
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    for (int i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(edges_.size() * 2);
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (auto& [u, v] : edges_) {
      adj_[cursor[u]++] = v;
      adj_[cursor[v]++] = u;
    }
    for (int u = 0; u < n_; ++u)
      std::sort(adj_.begin() + offsets_[u], adj_.begin() + offsets_[u + 1]);

    if (labels.empty()) labels.assign(n_, -1);
    if (static_cast<int>(labels.size()) != n_)
      throw DataError("label vector size mismatch");
    labels_ = std::move(labels);
    num_classes_ = 0;
    for (int y : labels_) num_classes_ = std::max(num_classes_, y + 1);

    feat_dim_ = feature_dim;
    if (feat_dim_ >= 0) {
      if (features.size() != static_cast<std::size_t>(n_) * feat_dim_)
        throw DataError("feature matrix size mismatch");
      features_ = std::move(features);
    }
  }

  void check_node(int u) const {
    if (u < 0 || u >= n_)
      throw DataError("node id " + std::to_string(u) + " out of range [0," +
                      std::to_string(n_) + ")");
  }

  // Distances from u, -1 for unreachable; stops expanding past max_depth
  // (max_depth < 0 means unbounded).
  std::vector<int> bfs_distances(int u, int max_depth) const {
    std::vector<int> dist(n_, -1);
    dist[u] = 0;
    std::queue<int> q;
    q.push(u);
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      if (max_depth >= 0 && dist[x] >= max_depth) continue;
      for (int y : neighbors(x)) {
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          q.push(y);
        }
      }
    }
    return dist;
  }

  template <typename Fn>
  static void for_each_data_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      fn(line, lineno);
    }
  }

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> offsets_{0};
  std::vector<int> adj_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::vector<double> features_;
  int feat_dim_ = -1;
};

}  // namespace strucmix
