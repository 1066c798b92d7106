#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace strucmix::dtw {

// Element cost for degree comparisons, following the struc2vec convention:
// ratio of the larger to the smaller value minus one, with both sides clamped
// to at least 1 so degree-0 entries stay well-defined (cost >= 0).
inline double element_cost(double a, double b) {
  double hi = std::max(a, b), lo = std::min(a, b);
  return std::max(1.0, hi) / std::max(1.0, lo) - 1.0;
}

struct PathPoint {
  int i = 0, j = 0;
  bool operator==(const PathPoint&) const = default;
};

struct Result {
  double cost = 0;
  std::vector<PathPoint> path;  // from (0,0) to (n-1, m-1)
};

// Per-row column window [lo, hi], inclusive.
struct Window {
  std::vector<int> lo, hi;
};

inline Window full_window(int n, int m) {
  Window w;
  w.lo.assign(n, 0);
  w.hi.assign(n, m - 1);
  return w;
}

// Dynamic program restricted to a window; cells outside are unreachable.
inline Result dtw_windowed(std::span<const double> s1, std::span<const double> s2,
                           const Window& win) {
  int n = static_cast<int>(s1.size()), m = static_cast<int>(s2.size());
  if (n == 0 || m == 0) throw std::invalid_argument("DTW requires non-empty sequences");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // ragged cost storage, one row per i
  std::vector<std::vector<double>> d(n);
  for (int i = 0; i < n; ++i) d[i].assign(win.hi[i] - win.lo[i] + 1, kInf);
  auto at = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || j < win.lo[i] || j > win.hi[i]) return kInf;
    return d[i][j - win.lo[i]];
  };

  for (int i = 0; i < n; ++i) {
    for (int j = win.lo[i]; j <= win.hi[i]; ++j) {
      double c = element_cost(s1[i], s2[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0;
      } else {
        best = std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)});
      }
      d[i][j - win.lo[i]] = c + best;
    }
  }
  Result r;
  r.cost = at(n - 1, m - 1);
  // backtrack along minimal predecessors
  int i = n - 1, j = m - 1;
  r.path.push_back({i, j});
  while (i != 0 || j != 0) {
    double diag = at(i - 1, j - 1), up = at(i - 1, j), left = at(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    r.path.push_back({i, j});
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

inline Result dtw_exact(std::span<const double> s1, std::span<const double> s2) {
  return dtw_windowed(s1, s2, full_window(static_cast<int>(s1.size()),
                                          static_cast<int>(s2.size())));
}

namespace detail {

inline std::vector<double> halve(std::span<const double> s) {
  std::vector<double> out;
  out.reserve((s.size() + 1) / 2);
  std::size_t i = 0;
  for (; i + 1 < s.size(); i += 2) out.push_back((s[i] + s[i + 1]) / 2.0);
  if (i < s.size()) out.push_back(s[i]);
  return out;
}

// Projects a coarse warp path onto the finer grid and dilates it by `radius`
// cells in every direction, producing contiguous per-row intervals.
inline Window expand_window(const std::vector<PathPoint>& coarse_path, int n, int m, int radius) {
  std::vector<int> lo(n, m), hi(n, -1);
  auto mark = [&](int i, int j) {
    if (i < 0 || i >= n) return;
    j = std::clamp(j, 0, m - 1);
    lo[i] = std::min(lo[i], j);
    hi[i] = std::max(hi[i], j);
  };
  // a warp path visits every coarse row/column, so upsampling covers every
  // fine row (mark() clips the odd-length overshoot)
  for (auto [ci, cj] : coarse_path)
    for (int i = 2 * ci; i <= 2 * ci + 1; ++i)
      for (int j = 2 * cj; j <= 2 * cj + 1; ++j) mark(i, j);
  Window w;
  w.lo.assign(n, 0);
  w.hi.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    int lo_min = lo[i], hi_max = hi[i];
    for (int k = std::max(0, i - radius); k <= std::min(n - 1, i + radius); ++k) {
      lo_min = std::min(lo_min, lo[k]);
      hi_max = std::max(hi_max, hi[k]);
    }
    w.lo[i] = std::clamp(lo_min - radius, 0, m - 1);
    w.hi[i] = std::clamp(hi_max + radius, 0, m - 1);
  }
  return w;
}

}  // namespace detail

// FastDTW (Salvador & Chan): recursive coarsening with a windowed refinement
// pass. With radius >= max(|s1|, |s2|) this reduces to the exact DP.
inline Result fast_dtw(std::span<const double> s1, std::span<const double> s2, int radius = 1) {
  int n = static_cast<int>(s1.size()), m = static_cast<int>(s2.size());
  int min_size = radius + 2;
  if (n <= min_size || m <= min_size) return dtw_exact(s1, s2);
  auto c1 = detail::halve(s1);
  auto c2 = detail::halve(s2);
  Result coarse = fast_dtw(c1, c2, radius);
  Window win = detail::expand_window(coarse.path, n, m, radius);
  return dtw_windowed(s1, s2, win);
}

struct DtwOptions {
  int exact_threshold = 64;  // exact DP below this length
  int radius = 1;            // FastDTW search radius otherwise
};

// Alignment cost between two non-increasing degree sequences.
inline double dtw_cost(std::span<const double> s1, std::span<const double> s2,
                       const DtwOptions& opt = {}) {
  if (s1.empty() || s2.empty())
    throw std::invalid_argument("DTW requires non-empty sequences");
  if (static_cast<int>(std::max(s1.size(), s2.size())) < opt.exact_threshold)
    return dtw_exact(s1, s2).cost;
  return fast_dtw(s1, s2, opt.radius).cost;
}

}  // namespace strucmix::dtw
