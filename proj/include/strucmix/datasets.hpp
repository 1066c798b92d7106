#pragma once

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "strucmix/errors.hpp"
#include "strucmix/graph.hpp"
#include "strucmix/rng.hpp"
#include "strucmix/splits.hpp"

namespace strucmix {

// --- synthetic generators ----------------------------------------------------
//
// All generators are deterministic functions of their spec (including the
// seed). Sizes default to desk scale.

struct PlantedPartitionSpec {
  int blocks = 3;
  int block_size = 40;
  double p_intra = 0.25;
  double p_inter = 0.02;
  double feature_noise = 1.0;
  std::uint64_t seed = 1;
};

// Stochastic block model with block ids as labels and noisy label one-hots as
// features: the assortative regime (or disassortative, with p_inter > p_intra).
inline LabeledGraph gen_planted_partition(const PlantedPartitionSpec& spec) {
  if (spec.blocks < 2 || spec.block_size < 1)
    throw std::invalid_argument("planted partition needs >= 2 blocks");
  if (!(spec.p_intra >= 0 && spec.p_intra <= 1 && spec.p_inter >= 0 && spec.p_inter <= 1))
    throw std::invalid_argument("edge probabilities must lie in [0,1]");
  int n = spec.blocks * spec.block_size;
  RngStream edges_rng(spec.seed, "planted-partition/edges");
  RngStream feat_rng(spec.seed, "planted-partition/features");
  std::vector<int> labels(n);
  for (int u = 0; u < n; ++u) labels[u] = u / spec.block_size;
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double p = labels[u] == labels[v] ? spec.p_intra : spec.p_inter;
      if (edges_rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  int d = spec.blocks;
  std::vector<double> x(static_cast<std::size_t>(n) * d);
  for (int u = 0; u < n; ++u)
    for (int j = 0; j < d; ++j)
      x[static_cast<std::size_t>(u) * d + j] =
          (j == labels[u] ? 1.0 : 0.0) + spec.feature_noise * feat_rng.normal();
  return LabeledGraph(n, std::move(edges), std::move(labels), std::move(x), d);
}

struct StructuralTwinsSpec {
  int motifs_per_class = 5;   // two motif families, A and B
  int chains_per_hub = 3;
  int chain_len_a = 3;
  int chain_len_b = 4;
  int background_per_anchor = 5;  // cycle length per hub anchor
  int chords = 4;                 // random background chords (seed variety)
  int feature_dim = 8;
  double feature_noise = 1.0;
  std::uint64_t seed = 1;
};

// Plants two families of identical hub motifs far apart on a background
// cycle. Hubs of a family share a label that differs from everything in their
// neighborhood, so they are disassortative in G while being structurally
// identical to each other; the families differ only deep in their hop rings
// (chain length), not in any low-hop view.
//
// Classes: 0 = family-A hubs, 1 = family-B hubs, 2 = background and chain
// interiors, 3 = chain tails. Features carry no label signal (pure noise).
inline LabeledGraph gen_structural_twins(const StructuralTwinsSpec& spec) {
  if (spec.motifs_per_class < 1 || spec.chains_per_hub < 1 || spec.chain_len_a < 1 ||
      spec.chain_len_b < 1)
    throw std::invalid_argument("structural twins spec sizes must be positive");
  int num_anchors = 2 * spec.motifs_per_class;
  int min_gap = 4;
  int bg = std::max(num_anchors * spec.background_per_anchor, num_anchors * min_gap);
  RngStream rng(spec.seed, "structural-twins/layout");

  // anchor positions on the cycle: minimum gap plus randomly sprinkled slack
  std::vector<int> gaps(num_anchors, min_gap);
  int slack = bg - num_anchors * min_gap;
  for (int i = 0; i < slack; ++i) ++gaps[rng.uniform_int(0, num_anchors - 1)];
  std::vector<int> anchors(num_anchors);
  int pos = 0;
  for (int i = 0; i < num_anchors; ++i) {
    anchors[i] = pos;
    pos += gaps[i];
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < bg; ++i) edges.emplace_back(i, (i + 1) % bg);

  std::vector<char> is_anchor(bg, 0);
  for (int a : anchors) is_anchor[a] = 1;
  std::vector<char> chord_used(bg, 0);
  int placed = 0;
  for (int attempt = 0; attempt < 200 && placed < spec.chords; ++attempt) {
    int i = rng.uniform_int(0, bg - 1);
    int j = rng.uniform_int(0, bg - 1);
    if (i == j) continue;
    int d = std::abs(i - j);
    d = std::min(d, bg - d);
    if (d < 2) continue;  // would duplicate a cycle edge
    if (is_anchor[i] || is_anchor[j] || chord_used[i] || chord_used[j]) continue;
    chord_used[i] = chord_used[j] = 1;
    edges.emplace_back(std::min(i, j), std::max(i, j));
    ++placed;
  }

  int next = bg;
  std::vector<std::pair<int, int>> hub_of_anchor;  // (hub id, family)
  std::vector<int> tails;
  for (int m = 0; m < num_anchors; ++m) {
    int family = m % 2;
    int len = family == 0 ? spec.chain_len_a : spec.chain_len_b;
    int hub = next++;
    hub_of_anchor.emplace_back(hub, family);
    edges.emplace_back(anchors[m], hub);
    for (int c = 0; c < spec.chains_per_hub; ++c) {
      int prev = hub;
      for (int step = 0; step < len; ++step) {
        int node = next++;
        edges.emplace_back(prev, node);
        prev = node;
      }
      tails.push_back(prev);
    }
  }
  int n = next;
  std::vector<int> labels(n, 2);
  for (auto& [hub, family] : hub_of_anchor) labels[hub] = family;
  for (int t : tails) labels[t] = 3;

  RngStream feat_rng(spec.seed, "structural-twins/features");
  std::vector<double> x(static_cast<std::size_t>(n) * spec.feature_dim);
  for (double& v : x) v = spec.feature_noise * feat_rng.normal();
  return LabeledGraph(n, std::move(edges), std::move(labels), std::move(x), spec.feature_dim);
}

struct BarbellSpec {
  int clique = 3;
  int path_len = 0;  // nodes between the two cliques
  int copies = 1;
};

// Family of barbells: two k-cliques joined by a path. Labels: left clique 0,
// right clique 1, path interior 2.
inline LabeledGraph gen_barbell_family(const BarbellSpec& spec) {
  if (spec.clique < 2 || spec.copies < 1 || spec.path_len < 0)
    throw std::invalid_argument("barbell spec sizes invalid");
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels;
  int base = 0;
  for (int c = 0; c < spec.copies; ++c) {
    int k = spec.clique, p = spec.path_len;
    auto left = [&](int i) { return base + i; };
    auto path = [&](int i) { return base + k + i; };
    auto right = [&](int i) { return base + k + p + i; };
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        edges.emplace_back(left(i), left(j));
        edges.emplace_back(right(i), right(j));
      }
    int prev = left(k - 1);
    for (int i = 0; i < p; ++i) {
      edges.emplace_back(prev, path(i));
      prev = path(i);
    }
    edges.emplace_back(prev, right(0));
    for (int i = 0; i < k; ++i) {
      labels.push_back(0);
    }
    for (int i = 0; i < p; ++i) labels.push_back(2);
    for (int i = 0; i < k; ++i) labels.push_back(1);
    base += 2 * k + p;
  }
  return LabeledGraph(base, std::move(edges), std::move(labels));
}

struct DegreeLabelSpec {
  int nodes_per_class = 40;
  int feature_dim = 8;
  double feature_noise = 1.0;
  std::uint64_t seed = 1;
};

// Random graph whose labels are degree roles: three classes with target
// degrees ~{1-2, 3-5, 8-12}, wired by configuration-model stub matching.
// Features are pure noise, so only the degree profile predicts the label.
inline LabeledGraph gen_degree_label(const DegreeLabelSpec& spec) {
  if (spec.nodes_per_class < 2) throw std::invalid_argument("degree-label spec too small");
  RngStream rng(spec.seed, "degree-label/edges");
  int n = 3 * spec.nodes_per_class;
  std::vector<int> labels(n), target(n);
  for (int u = 0; u < n; ++u) {
    int cls = u / spec.nodes_per_class;
    labels[u] = cls;
    target[u] = cls == 0 ? rng.uniform_int(1, 2)
               : cls == 1 ? rng.uniform_int(3, 5)
                          : rng.uniform_int(8, 12);
  }
  std::vector<int> stubs;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < target[u]; ++i) stubs.push_back(u);
  rng.shuffle(stubs);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    int u = stubs[i], v = stubs[i + 1];
    if (u != v) edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  RngStream feat_rng(spec.seed, "degree-label/features");
  std::vector<double> x(static_cast<std::size_t>(n) * spec.feature_dim);
  for (double& v : x) v = spec.feature_noise * feat_rng.normal();
  return LabeledGraph(n, std::move(edges), std::move(labels), std::move(x), spec.feature_dim);
}

// Dispatch from a JSON spec: {"generator": "...", "seed": 1, ...params}.
// Generators: planted-partition, hub-spoke (structural twins), barbell-family,
// degree-label.
inline LabeledGraph gen_synthetic(const nlohmann::json& j) {
  std::string gen;
  try {
    gen = j.at("generator").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw DataError("synthetic spec needs a \"generator\" field");
  }
  auto num = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    return j.contains(key) ? j.at(key).get<T>() : fallback;
  };
  if (gen == "planted-partition") {
    PlantedPartitionSpec s;
    s.blocks = num("blocks", s.blocks);
    s.block_size = num("block_size", s.block_size);
    s.p_intra = num("p_intra", s.p_intra);
    s.p_inter = num("p_inter", s.p_inter);
    s.feature_noise = num("feature_noise", s.feature_noise);
    s.seed = num("seed", s.seed);
    return gen_planted_partition(s);
  }
  if (gen == "hub-spoke" || gen == "structural-twins") {
    StructuralTwinsSpec s;
    s.motifs_per_class = num("motifs_per_class", s.motifs_per_class);
    s.chains_per_hub = num("chains_per_hub", s.chains_per_hub);
    s.chain_len_a = num("chain_len_a", s.chain_len_a);
    s.chain_len_b = num("chain_len_b", s.chain_len_b);
    s.background_per_anchor = num("background_per_anchor", s.background_per_anchor);
    s.chords = num("chords", s.chords);
    s.feature_dim = num("feature_dim", s.feature_dim);
    s.feature_noise = num("feature_noise", s.feature_noise);
    s.seed = num("seed", s.seed);
    return gen_structural_twins(s);
  }
  if (gen == "barbell-family") {
    BarbellSpec s;
    s.clique = num("clique", s.clique);
    s.path_len = num("path_len", s.path_len);
    s.copies = num("copies", s.copies);
    return gen_barbell_family(s);
  }
  if (gen == "degree-label") {
    DegreeLabelSpec s;
    s.nodes_per_class = num("nodes_per_class", s.nodes_per_class);
    s.feature_dim = num("feature_dim", s.feature_dim);
    s.feature_noise = num("feature_noise", s.feature_noise);
    s.seed = num("seed", s.seed);
    return gen_degree_label(s);
  }
  throw DataError("unknown synthetic generator '" + gen + "'");
}

// --- benchmark loaders ---------------------------------------------------------
//
// Data is never vendored; loaders parse the published formats from a
// user-populated root directory. Expected layout per dataset family:
//
//   <root>/<name>/out1_graph_edges.txt            WebKB / Wikipedia pages
//   <root>/<name>/out1_node_feature_label.txt     (tab-separated, one header
//   <root>/<name>/splits/<name>_split_*.npz        row; features comma-joined)
//
//   <root>/<name>/<name>.cites                    citation networks, raw
//   <root>/<name>/<name>.content                  LINQS format
//
//   <root>/brazil-airports/brazil-airports.edgelist
//   <root>/brazil-airports/labels-brazil-airports.txt
//
// Air-traffic graphs have no features; downstream training synthesizes
// degree-bucket one-hots for them.

struct BenchmarkData {
  LabeledGraph graph;
  std::vector<SplitSet> splits;  // published fixed splits, when available
};

namespace npz {

namespace detail {

inline std::uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t le16(const unsigned char* p) { return p[0] | (p[1] << 8); }

inline std::vector<unsigned char> inflate_raw(const unsigned char* data, std::size_t size,
                                              std::size_t out_hint) {
  std::vector<unsigned char> out(std::max<std::size_t>(out_hint, 64));
  z_stream strm{};
  if (inflateInit2(&strm, -MAX_WBITS) != Z_OK) throw DataError("zlib init failed");
  strm.next_in = const_cast<unsigned char*>(data);
  strm.avail_in = static_cast<uInt>(size);
  strm.next_out = out.data();
  strm.avail_out = static_cast<uInt>(out.size());
  int rc;
  while ((rc = inflate(&strm, Z_NO_FLUSH)) == Z_OK) {
    if (strm.avail_out == 0) {
      std::size_t used = out.size();
      out.resize(out.size() * 2);
      strm.next_out = out.data() + used;
      strm.avail_out = static_cast<uInt>(out.size() - used);
    }
  }
  bool ok = rc == Z_STREAM_END;
  out.resize(out.size() - strm.avail_out);
  inflateEnd(&strm);
  if (!ok) throw DataError("zlib inflate failed");
  return out;
}

// Parses a 1-D .npy payload of bool/int/float type into integers.
inline std::vector<long> parse_npy_1d(const std::vector<unsigned char>& buf,
                                      const std::string& what) {
  if (buf.size() < 10 || std::memcmp(buf.data(), "\x93NUMPY", 6) != 0)
    throw DataError(what + ": not an npy payload");
  int major = buf[6];
  std::size_t header_len, header_off;
  if (major == 1) {
    header_len = le16(buf.data() + 8);
    header_off = 10;
  } else {
    header_len = le32(buf.data() + 8);
    header_off = 12;
  }
  std::string header(reinterpret_cast<const char*>(buf.data() + header_off), header_len);
  auto grab = [&](const std::string& key) -> std::string {
    auto k = header.find("'" + key + "'");
    if (k == std::string::npos) throw DataError(what + ": npy header missing " + key);
    auto colon = header.find(':', k);
    auto rest = header.substr(colon + 1);
    return rest;
  };
  std::string descr_rest = grab("descr");
  auto q1 = descr_rest.find('\'');
  auto q2 = descr_rest.find('\'', q1 + 1);
  std::string descr = descr_rest.substr(q1 + 1, q2 - q1 - 1);
  std::string shape_rest = grab("shape");
  auto p1 = shape_rest.find('(');
  auto p2 = shape_rest.find(')', p1);
  std::string shape_body = shape_rest.substr(p1 + 1, p2 - p1 - 1);
  long count = 0;
  {
    std::istringstream ss(shape_body);
    if (!(ss >> count)) throw DataError(what + ": unsupported npy shape (" + shape_body + ")");
    char c;
    long extra;
    while (ss >> c) {
      if (c == ',' && ss >> extra && extra != 1)
        throw DataError(what + ": expected a 1-D npy array");
    }
  }
  if (grab("fortran_order").find("True") != std::string::npos && count > 1) {
    // 1-D arrays are order-agnostic; anything else is unsupported anyway
  }
  int item = 0;
  bool is_float = false;
  if (descr == "|b1" || descr == "|u1" || descr == "|i1") item = 1;
  else if (descr == "<i2" || descr == "<u2") item = 2;
  else if (descr == "<i4" || descr == "<u4") item = 4;
  else if (descr == "<i8" || descr == "<u8") item = 8;
  else if (descr == "<f4") { item = 4; is_float = true; }
  else if (descr == "<f8") { item = 8; is_float = true; }
  else throw DataError(what + ": unsupported npy dtype " + descr);
  std::size_t data_off = header_off + header_len;
  if (buf.size() < data_off + static_cast<std::size_t>(count) * item)
    throw DataError(what + ": npy payload truncated");
  std::vector<long> out(count);
  const unsigned char* d = buf.data() + data_off;
  for (long i = 0; i < count; ++i, d += item) {
    if (is_float) {
      if (item == 4) {
        float f;
        std::memcpy(&f, d, 4);
        out[i] = static_cast<long>(f);
      } else {
        double f;
        std::memcpy(&f, d, 8);
        out[i] = static_cast<long>(f);
      }
    } else {
      long v = 0;
      std::memcpy(&v, d, item);  // little-endian host
      if (item < 8) v &= (1L << (8 * item)) - 1;
      out[i] = v;
    }
  }
  return out;
}

}  // namespace detail

// Reads the named 1-D arrays out of an .npz archive (a ZIP of .npy members,
// stored or deflated).
inline std::map<std::string, std::vector<long>> load_arrays(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<unsigned char> file((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (file.size() < 22) throw DataError(path + ": not a zip archive");
  // locate end-of-central-directory
  std::size_t eocd = std::string::npos;
  for (std::size_t i = file.size() - 22; i + 4 >= 4; --i) {
    if (detail::le32(file.data() + i) == 0x06054b50) {
      eocd = i;
      break;
    }
    if (i == 0) break;
  }
  if (eocd == std::string::npos) throw DataError(path + ": zip directory not found");
  std::uint16_t entries = detail::le16(file.data() + eocd + 10);
  std::size_t cd = detail::le32(file.data() + eocd + 16);
  std::map<std::string, std::vector<long>> out;
  for (int e = 0; e < entries; ++e) {
    if (detail::le32(file.data() + cd) != 0x02014b50)
      throw DataError(path + ": bad central directory entry");
    std::uint16_t method = detail::le16(file.data() + cd + 10);
    std::uint32_t csize = detail::le32(file.data() + cd + 20);
    std::uint32_t usize = detail::le32(file.data() + cd + 24);
    std::uint16_t name_len = detail::le16(file.data() + cd + 28);
    std::uint16_t extra_len = detail::le16(file.data() + cd + 30);
    std::uint16_t comment_len = detail::le16(file.data() + cd + 32);
    std::uint32_t local_off = detail::le32(file.data() + cd + 42);
    std::string name(reinterpret_cast<const char*>(file.data() + cd + 46), name_len);
    cd += 46 + name_len + extra_len + comment_len;

    if (detail::le32(file.data() + local_off) != 0x04034b50)
      throw DataError(path + ": bad local header for " + name);
    std::uint16_t lname = detail::le16(file.data() + local_off + 26);
    std::uint16_t lextra = detail::le16(file.data() + local_off + 28);
    const unsigned char* data = file.data() + local_off + 30 + lname + lextra;
    std::vector<unsigned char> payload;
    if (method == 0) {
      payload.assign(data, data + csize);
    } else if (method == 8) {
      payload = detail::inflate_raw(data, csize, usize);
    } else {
      throw DataError(path + ": unsupported zip compression method for " + name);
    }
    std::string key = name.size() > 4 && name.ends_with(".npy") ? name.substr(0, name.size() - 4)
                                                                : name;
    out[key] = detail::parse_npy_1d(payload, path + ":" + name);
  }
  return out;
}

// Geom-GCN style split archive: boolean masks train_mask/val_mask/test_mask.
inline SplitSet load_mask_split(const std::string& path) {
  auto arrays = load_arrays(path);
  auto get = [&](const std::string& key) -> const std::vector<long>& {
    auto it = arrays.find(key);
    if (it == arrays.end()) throw DataError(path + ": missing array " + key);
    return it->second;
  };
  SplitSet s;
  const auto& tr = get("train_mask");
  const auto& va = get("val_mask");
  const auto& te = get("test_mask");
  for (std::size_t u = 0; u < tr.size(); ++u) {
    if (tr[u]) s.train.push_back(static_cast<int>(u));
    if (u < va.size() && va[u]) s.val.push_back(static_cast<int>(u));
    if (u < te.size() && te[u]) s.test.push_back(static_cast<int>(u));
  }
  return s;
}

}  // namespace npz

namespace detail {

inline bool looks_numeric(const std::string& tok) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '+') return false;
  return true;
}

inline LabeledGraph load_geomgcn_dir(const std::string& dir) {
  std::string edge_path = dir + "/out1_graph_edges.txt";
  std::string feat_path = dir + "/out1_node_feature_label.txt";
  std::ifstream fe(edge_path);
  if (!fe)
    throw DataError("missing " + edge_path +
                    " (expected the Geom-GCN new_data layout: out1_graph_edges.txt + "
                    "out1_node_feature_label.txt)");
  std::vector<std::pair<int, int>> edges;
  std::string line;
  long lineno = 0;
  while (std::getline(fe, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    ss >> a >> b;
    if (!looks_numeric(a)) {
      if (lineno == 1) continue;  // header row
      throw ParseError(edge_path, lineno, "expected numeric edge endpoints");
    }
    long u = std::stol(a), v = std::stol(b);
    if (u == v) continue;
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }

  std::ifstream ff(feat_path);
  if (!ff) throw DataError("missing " + feat_path);
  std::vector<std::tuple<int, std::vector<double>, int>> rows;
  int dim = -1, max_id = -1;
  lineno = 0;
  while (std::getline(ff, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id_tok, feat_tok, label_tok;
    if (!(ss >> id_tok >> feat_tok >> label_tok)) {
      if (lineno == 1) continue;
      throw ParseError(feat_path, lineno, "expected 'id features label'");
    }
    if (!looks_numeric(id_tok)) {
      if (lineno == 1) continue;  // header row
      throw ParseError(feat_path, lineno, "non-numeric node id");
    }
    int u = std::stoi(id_tok);
    std::vector<double> feats;
    std::istringstream fs(feat_tok);
    std::string item;
    while (std::getline(fs, item, ',')) feats.push_back(std::stod(item));
    if (dim < 0)
      dim = static_cast<int>(feats.size());
    else if (static_cast<int>(feats.size()) != dim)
      throw ParseError(feat_path, lineno, "feature dimension mismatch");
    rows.emplace_back(u, std::move(feats), std::stoi(label_tok));
    max_id = std::max(max_id, u);
  }
  for (auto& [u, v] : edges) max_id = std::max({max_id, u, v});
  int n = max_id + 1;
  std::vector<int> labels(n, -1);
  std::vector<double> x(static_cast<std::size_t>(n) * dim, 0.0);
  for (auto& [u, feats, y] : rows) {
    labels[u] = y;
    std::copy(feats.begin(), feats.end(), x.begin() + static_cast<std::size_t>(u) * dim);
  }
  return LabeledGraph(n, std::move(edges), std::move(labels), std::move(x), dim);
}

inline LabeledGraph load_linqs_dir(const std::string& dir, const std::string& name) {
  std::string content_path = dir + "/" + name + ".content";
  std::string cites_path = dir + "/" + name + ".cites";
  std::ifstream fc(content_path);
  if (!fc)
    throw DataError("missing " + content_path +
                    " (expected the LINQS layout: " + name + ".content + " + name + ".cites)");
  std::map<std::string, int> id_of;
  std::vector<std::vector<double>> feats;
  std::vector<std::string> class_names;
  std::vector<int> labels;
  std::string line;
  long lineno = 0;
  while (std::getline(fc, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(std::move(t));
    if (toks.size() < 3) throw ParseError(content_path, lineno, "expected id, features, class");
    int u = static_cast<int>(id_of.size());
    if (!id_of.emplace(toks.front(), u).second)
      throw ParseError(content_path, lineno, "duplicate node id " + toks.front());
    std::vector<double> row(toks.size() - 2);
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) row[i - 1] = std::stod(toks[i]);
    feats.push_back(std::move(row));
    labels.push_back(-1);  // resolved below once class names are sorted
    class_names.push_back(toks.back());
  }
  std::vector<std::string> sorted_names = class_names;
  std::sort(sorted_names.begin(), sorted_names.end());
  sorted_names.erase(std::unique(sorted_names.begin(), sorted_names.end()), sorted_names.end());
  for (std::size_t u = 0; u < labels.size(); ++u)
    labels[u] = static_cast<int>(
        std::lower_bound(sorted_names.begin(), sorted_names.end(), class_names[u]) -
        sorted_names.begin());

  std::ifstream fe(cites_path);
  if (!fe) throw DataError("missing " + cites_path);
  std::vector<std::pair<int, int>> edges;
  lineno = 0;
  while (std::getline(fe, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a >> b)) throw ParseError(cites_path, lineno, "expected 'cited citing' pair");
    auto ia = id_of.find(a), ib = id_of.find(b);
    if (ia == id_of.end() || ib == id_of.end()) continue;  // dangling citation ids
    if (ia->second == ib->second) continue;
    edges.emplace_back(ia->second, ib->second);
  }
  int n = static_cast<int>(id_of.size());
  int dim = feats.empty() ? 0 : static_cast<int>(feats.front().size());
  std::vector<double> x(static_cast<std::size_t>(n) * dim, 0.0);
  for (int u = 0; u < n; ++u)
    std::copy(feats[u].begin(), feats[u].end(), x.begin() + static_cast<std::size_t>(u) * dim);
  return LabeledGraph(n, std::move(edges), std::move(labels), std::move(x), dim);
}

inline LabeledGraph load_airports_dir(const std::string& dir, const std::string& name) {
  std::string edge_path = dir + "/" + name + ".edgelist";
  std::string label_path = dir + "/labels-" + name + ".txt";
  std::ifstream fe(edge_path);
  if (!fe)
    throw DataError("missing " + edge_path + " (expected the struc2vec layout: " + name +
                    ".edgelist + labels-" + name + ".txt)");
  std::vector<std::pair<int, int>> edges;
  std::string line;
  long lineno = 0;
  int max_id = -1;
  while (std::getline(fe, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    long u, v;
    if (!(ss >> u >> v)) throw ParseError(edge_path, lineno, "expected 'u v' pair");
    if (u == v) continue;
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
  }
  std::ifstream fl(label_path);
  if (!fl) throw DataError("missing " + label_path);
  std::vector<std::pair<int, int>> label_rows;
  lineno = 0;
  while (std::getline(fl, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a >> b)) throw ParseError(label_path, lineno, "expected 'node label'");
    if (!looks_numeric(a)) {
      if (lineno == 1) continue;  // "node label" header
      throw ParseError(label_path, lineno, "non-numeric node id");
    }
    label_rows.emplace_back(std::stoi(a), std::stoi(b));
    max_id = std::max(max_id, std::stoi(a));
  }
  int n = max_id + 1;
  std::vector<int> labels(n, -1);
  for (auto& [u, y] : label_rows) labels[u] = y;
  return LabeledGraph(n, std::move(edges), std::move(labels));
}

}  // namespace detail

inline BenchmarkData load_benchmark(const std::string& name, const std::string& root) {
  namespace fs = std::filesystem;
  std::string dir = root + "/" + name;
  BenchmarkData data;
  bool geomgcn = name == "cornell" || name == "texas" || name == "wisconsin" ||
                 name == "chameleon" || name == "squirrel" || name == "actor";
  if (geomgcn) {
    data.graph = detail::load_geomgcn_dir(dir);
  } else if (name == "cora" || name == "citeseer") {
    data.graph = detail::load_linqs_dir(dir, name);
  } else if (name == "brazil-airports" || name == "europe-airports" || name == "usa-airports") {
    data.graph = detail::load_airports_dir(dir, name);
  } else {
    throw DataError("unknown benchmark '" + name +
                    "' (supported: cornell, texas, wisconsin, chameleon, squirrel, actor, "
                    "cora, citeseer, brazil-airports, europe-airports, usa-airports)");
  }
  fs::path splits_dir = fs::path(dir) / "splits";
  if (fs::exists(splits_dir)) {
    std::vector<std::string> files;
    for (auto& entry : fs::directory_iterator(splits_dir))
      if (entry.path().extension() == ".npz") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    for (auto& f : files) data.splits.push_back(npz::load_mask_split(f));
  }
  return data;
}

}  // namespace strucmix
