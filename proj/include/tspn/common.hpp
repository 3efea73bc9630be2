#pragma once

// Shared tolerances, a deterministic RNG, and a tiny parallel-for helper.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tspn {

// Tolerance ladder: unit-norm checks, orthogonality / on-line checks,
// set-membership in tour validity checks.
inline constexpr double kUnitTol = 1e-12;
inline constexpr double kOrthoTol = 1e-9;
inline constexpr double kMemberTol = 1e-7;

inline constexpr double kPi = 3.14159265358979323846;

// SplitMix64. Stable across platforms and standard-library versions, unlike
// the <random> distributions.
struct Rng {
  uint64_t state = 0;

  explicit Rng(uint64_t seed = 1) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0,1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // n must be > 0 and small; modulo bias is negligible for our sizes.
  int uniform_int(int n) { return int(next() % uint64_t(n)); }

  double normal() {
    double u1 = 1.0 - uniform();  // (0,1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next() % i;
      std::swap(v[i - 1], v[j]);
    }
  }
};

// Derive an independent stream from (seed, index) pairs.
inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Chunked parallel loop. fn(begin, end) is called on [begin,end) ranges.
// With threads <= 1 (or tiny n) runs inline.
inline void parallel_for_ranges(size_t n, const std::function<void(size_t, size_t)>& fn,
                                unsigned threads = 0) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || n < 2048) {
    fn(0, n);
    return;
  }
  threads = std::min<unsigned>(threads, 64);
  size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    size_t b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, b, e);
  }
  for (auto& th : pool) th.join();
}

}  // namespace tspn
