#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace causalsens {

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Stable per-label sub-seed derivation; used so that ranking many spaces in
// any order (or in parallel) draws identical streams per space.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = fnv1a64(label);
  h ^= seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 1099511628211ULL;
  return h;
}

// Deterministic draws over mt19937_64. The transformations are written out
// here instead of going through std:: distributions, whose algorithms are
// unspecified; a fixed seed must reproduce the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_open_left() { return 1.0 - uniform(); }

  double exponential() { return -std::log(uniform_open_left()); }

  double normal() {
    const double u1 = uniform_open_left();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }

  // Marsaglia-Tsang; shape < 1 goes through the boost identity.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_open_left();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open_left();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  // Gaussian conditioned on (0, inf) by rejection; fine for the sigmas in
  // use here (acceptance >= 0.5 whenever mean >= 0).
  double trunc_normal_positive(double mean, double sigma) {
    for (;;) {
      const double z = mean + sigma * normal();
      if (z > 0.0) return z;
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace causalsens
