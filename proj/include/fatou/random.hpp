#pragma once

// Deterministic sampling. Only mt19937_64 output bits are used, so draws are
// identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fatou/core.hpp"

namespace fatou {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream keyed by (seed, stream, index) so element n never depends on access order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) : eng_(stream_seed(seed, stream, index)) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  cplx phase() {
    double t = 2.0 * std::numbers::pi * uniform();
    return {std::cos(t), std::sin(t)};
  }

  // Modulus uniform in [lo, hi], uniform argument.
  cplx annulus(double lo, double hi) { return uniform(lo, hi) * phase(); }

  // Uniform in the closed disc of radius r.
  cplx disc(double r) { return r * std::sqrt(uniform()) * phase(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform on the sphere of radius r in C^k.
  Point sphere(int k, double r) {
    Point z(static_cast<std::size_t>(k));
    double s = 0.0;
    do {
      s = 0.0;
      for (auto& c : z) {
        c = {normal(), normal()};
        s += std::norm(c);
      }
    } while (s == 0.0);
    double f = r / std::sqrt(s);
    for (auto& c : z) c *= f;
    return z;
  }

  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fatou
