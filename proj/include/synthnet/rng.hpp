#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sn {

// Seeded deterministic RNG. splitmix64 core: the output stream depends only on
// the seed, never on platform or library version, which keeps generated
// netlists and reports byte-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Lemire's multiply-shift; slight modulo bias is
  // irrelevant here and the result is platform-independent.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Normal draw via inverse CDF on one uniform. sigma == 0 degenerates to mu.
  double normal(double mu, double sigma) {
    if (sigma <= 0.0) return mu;
    double u = next_double();
    // next_double() can return exactly 0; keep the quantile finite.
    if (u < 1e-300) u = 1e-300;
    return mu + sigma * normal_quantile(u);
  }

  // Acklam's rational approximation of the standard normal quantile
  // (relative error < 1.15e-9 over (0,1)).
  static double normal_quantile(double u) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double lo = 0.02425, hi = 1.0 - 0.02425;
    if (u < lo) {
      double q = std::sqrt(-2.0 * std::log(u));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > hi) {
      double q = std::sqrt(-2.0 * std::log(1.0 - u));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = u - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

 private:
  uint64_t state_;
};

// Order-insensitive derived seeds: hash_mix(seed, tag) yields the sub-stream
// seed for a parallel work item so results do not depend on scheduling.
inline uint64_t hash_mix(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t hash_str(uint64_t seed, std::string_view s) {
  uint64_t h = 1469598103934665603ull ^ seed;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return hash_mix(seed, h);
}

// Round half-to-even, the tie rule used for every sampled quantity.
inline long long round_even(double x) { return std::llrint(x); }

}  // namespace sn
