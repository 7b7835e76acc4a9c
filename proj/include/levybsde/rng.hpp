#pragma once
#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>
#include <algorithm>

namespace levybsde {

// Counter-based splitmix64: output i of a stream keyed by `key` is a pure
// function of (key, i), so any path/worker can be reproduced in isolation
// and results cannot depend on thread scheduling.
inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over a short string; used to derive stream tags from experiment names.
inline constexpr std::uint64_t tag64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) { h ^= static_cast<unsigned char>(c); h *= 1099511628211ULL; }
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key), ctr_(0) {}

  // Derive a decorrelated stream key from (master seed, tag, index).
  static Stream keyed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t k = mix64(master + kGamma);
    k = mix64(k ^ tag);
    k = mix64(k + index * kGamma);
    return Stream(k);
  }

  std::uint64_t next_u64() { ctr_ += kGamma; return mix64(key_ + ctr_); }

  // Uniform on (0,1): 53-bit mantissa, never exactly 0 or 1.
  double uniform() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-54 : u;
  }

  double uniform_on(double a, double b) { return a + (b - a) * uniform(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal();                       // via inverse CDF (exact in law)
  long poisson(double mean);             // inversion (<30) or PTRD

  // n i.i.d. uniforms on (0,T], sorted ascending.
  std::vector<double> sorted_uniform_times(long n, double T) {
    std::vector<double> t(static_cast<size_t>(n));
    for (auto& x : t) x = T * uniform();
    std::sort(t.begin(), t.end());
    return t;
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace levybsde
