#pragma once

// Independent brute-force oracles shared by the unit tests. They use only
// membership queries, never the library's closed forms.

#include <cmath>

#include "nlgeom/sets.hpp"

namespace oracle {

/// |E ∩ B_r(c)| / |B_r| by counting cell centres of an n^d grid over the cube.
inline double gridFraction(const nlgeom::RegionSet& set, const nlgeom::Point& c, double r, int n) {
  const int d = set.dim();
  long long inBall = 0, inSet = 0;
  std::vector<int> idx(d, 0);
  const double h = 2.0 * r / n;
  while (true) {
    nlgeom::Point x(d);
    double q = 0.0;
    for (int i = 0; i < d; ++i) {
      const double off = -r + (idx[i] + 0.5) * h;
      x[i] = c[i] + off;
      q += off * off;
    }
    if (q < r * r) {
      ++inBall;
      if (set.membership(x) == nlgeom::Membership::Inside) ++inSet;
    }
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  return static_cast<double>(inSet) / static_cast<double>(inBall);
}

/// Fraction of the ball {|y - c| < r} lying in the periodic slab, by 1-D
/// midpoint integration of the cross-section measure.
inline double slabOverlapFraction(int dim, double delta, double c1, double r, int n = 200000) {
  double in = 0.0, all = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = -r + (k + 0.5) * 2.0 * r / n;
    const double w = std::pow(std::max(0.0, r * r - t * t), 0.5 * (dim - 1));
    const double x = c1 + t;
    const double m = std::fmod(std::fmod(x, 2.0 * delta) + 2.0 * delta, 2.0 * delta);
    all += w;
    if (m < delta) in += w;
  }
  return in / all;
}

}  // namespace oracle
