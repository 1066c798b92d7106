#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace strucmix {

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic named random stream. Every component draws from its own
// stream derived from (root seed, stream name), so e.g. changing how many
// dropout samples are taken never perturbs the split assignment.
//
// The generator is xoshiro256** seeded via splitmix64; distributions are
// implemented here rather than with <random> so that sequences are identical
// across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::string_view name) {
    std::uint64_t sm = root_seed ^ fnv1a64(name);
    for (auto& s : s_) s = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // in [0, n), unbiased
  std::uint64_t uniform_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller; u clamped away from 0
    double u = uniform();
    if (u < 1e-300) u = 1e-300;
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  double spare_ = 0;
  bool have_spare_ = false;
};

// Derives a child seed for an independent component, e.g.
// child_seed(seed, "ablate/wrgat/structure/3").
inline std::uint64_t child_seed(std::uint64_t root_seed, std::string_view name) {
  std::uint64_t sm = root_seed ^ fnv1a64(name);
  return splitmix64(sm);
}

}  // namespace strucmix
