#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "scotlab/common.hpp"

namespace scotlab {

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Counter-based generator: draw i of stream (key) is a pure function of
// (key, i), so streams keyed per trajectory/parameter are independent of
// generation order and worker count.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(detail::splitmix64(key)) {}
  CounterRng(uint64_t seed, uint64_t stream)
      : CounterRng(detail::splitmix64(seed) ^ (stream * 0x9e3779b97f4a7c15ULL)) {}
  CounterRng(uint64_t seed, const std::string& name)
      : CounterRng(detail::splitmix64(seed) ^ detail::fnv1a(name)) {}

  uint64_t next_u64() { return detail::splitmix64(key_ ^ counter_++); }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in {lo, ..., hi} inclusive
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + int64_t(next_u64() % uint64_t(hi - lo + 1));
  }

  // Box-Muller; one value per call, pairs drawn fresh.
  double normal() {
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  // normal(0, std) truncated to [-2 std, 2 std] by redraw
  double trunc_normal(double std) {
    double x = normal(0.0, std);
    while (std::abs(x) > 2.0 * std) x = normal(0.0, std);
    return x;
  }

  // support {1, 2, ...}
  int64_t geometric(double p) {
    int64_t k = 1;
    while (uniform() >= p) ++k;
    return k;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int64_t i = int64_t(v.size()) - 1; i > 0; --i)
      std::swap(v[size_t(i)], v[size_t(uniform_int(0, i))]);
  }

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace scotlab
