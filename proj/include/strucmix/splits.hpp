#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "strucmix/errors.hpp"
#include "strucmix/rng.hpp"
#include "strucmix/wrgnn.hpp"

namespace strucmix {

// Random stratified train/val/test split over the labeled nodes. Every class
// contributes at least one training node (and one validation node when it has
// two or more members); fractions must sum to at most 1, the remainder is the
// test share.
inline SplitSet stratified_split(const std::vector<int>& labels, double p_train, double p_val,
                                 RngStream& rng) {
  if (!(p_train > 0) || !(p_val >= 0) || p_train + p_val >= 1.0 + 1e-12)
    throw std::invalid_argument("split fractions must satisfy 0 < train, train+val < 1");
  std::map<int, std::vector<int>> by_class;
  for (int u = 0; u < static_cast<int>(labels.size()); ++u)
    if (labels[u] >= 0) by_class[labels[u]].push_back(u);
  if (by_class.empty()) throw DataError("no labeled nodes to split");

  SplitSet s;
  for (auto& [cls, nodes] : by_class) {
    rng.shuffle(nodes);
    int n = static_cast<int>(nodes.size());
    int n_tr = std::clamp(static_cast<int>(std::lround(p_train * n)), 1, n);
    int n_val = std::clamp(static_cast<int>(std::lround(p_val * n)), n - n_tr > 0 ? 1 : 0,
                           n - n_tr);
    for (int i = 0; i < n_tr; ++i) s.train.push_back(nodes[i]);
    for (int i = n_tr; i < n_tr + n_val; ++i) s.val.push_back(nodes[i]);
    for (int i = n_tr + n_val; i < n; ++i) s.test.push_back(nodes[i]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline void validate_split(const SplitSet& s, const std::vector<int>& labels) {
  std::unordered_set<int> seen;
  auto check = [&](const std::vector<int>& part, const char* name) {
    for (int u : part) {
      if (u < 0 || u >= static_cast<int>(labels.size()))
        throw DataError(std::string("split node out of range in ") + name);
      if (labels[u] < 0)
        throw DataError(std::string("split contains unlabeled node in ") + name);
      if (!seen.insert(u).second)
        throw DataError("split masks are not disjoint (node " + std::to_string(u) + ")");
    }
  };
  check(s.train, "train");
  check(s.val, "val");
  check(s.test, "test");
}

inline nlohmann::json split_to_json(const SplitSet& s) {
  return nlohmann::json{{"train", s.train}, {"val", s.val}, {"test", s.test}};
}

inline SplitSet split_from_json(const nlohmann::json& j) {
  SplitSet s;
  try {
    s.train = j.at("train").get<std::vector<int>>();
    s.val = j.at("val").get<std::vector<int>>();
    s.test = j.at("test").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad split JSON: ") + e.what());
  }
  return s;
}

inline void save_splits_json(const SplitSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << split_to_json(s).dump(2) << "\n";
}

inline SplitSet load_splits_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return split_from_json(j);
}

}  // namespace strucmix
