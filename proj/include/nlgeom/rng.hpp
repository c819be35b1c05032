#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "nlgeom/point.hpp"

namespace nlgeom {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  return mix64(mix64(mix64(mix64(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL)) ^
               (c * 0x85157af5ULL + 0x1234567ULL));
}

/// Deterministic generator. Conversions are done by hand so that streams are
/// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniformOpenLow() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = uniformOpenLow();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int index(int n) { return static_cast<int>(uniform() * n); }

 private:
  std::mt19937_64 engine_;
};

inline Point randomDirection(Rng& rng, int dim) {
  Point p(dim);
  if (dim == 1) {
    p[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return p;
  }
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) p[i] = rng.normal();
    n2 = norm2(p);
  } while (n2 == 0.0);
  return p / std::sqrt(n2);
}

inline Point uniformInBall(Rng& rng, const Point& center, double radius) {
  const int d = center.dim();
  const Point dir = randomDirection(rng, d);
  const double r = radius * std::pow(rng.uniform(), 1.0 / d);
  return center + r * dir;
}

}  // namespace nlgeom
