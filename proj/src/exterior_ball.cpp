#include <algorithm>
#include <cmath>
#include <limits>

#include "nlgeom/sets.hpp"

namespace nlgeom {

namespace {

constexpr int kVerifyLevels = 16;

double localScale(const RegionSet& set, const Point& x) {
  const double fs = set.featureScale();
  const double fallback = std::max(1.0, norm(x));
  return std::isfinite(fs) ? std::min(fs, fallback) : fallback;
}

}  // namespace

std::optional<Point> outwardNormal(const RegionSet& set, const Point& x) {
  const int d = set.dim();
  const double h = 1e-6 * localScale(set, x);
  Point g(d);
  for (int i = 0; i < d; ++i) {
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double sp = set.sign(xp), sm = set.sign(xm);
    if (!std::isfinite(sp) || !std::isfinite(sm)) return std::nullopt;
    g[i] = (sp - sm) / (2.0 * h);
  }
  const double gn = norm(g);
  if (!(gn > 1e-8)) return std::nullopt;
  return g / gn;
}

bool verifyExteriorBall(const RegionSet& set, const TouchingBall& ball, int samples, std::uint64_t seed) {
  if (!(ball.radius > 0.0)) return false;
  if (const auto meets = set.meetsBall(ball.center, ball.radius)) return !*meets;
  // A distance-valued sign field decides disjointness directly.
  if (set.signIsDistance()) {
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + norm(ball.center));
    return set.sign(ball.center) >= ball.radius * (1.0 - 1e-9) - roundoff;
  }
  const Point n = (ball.center - ball.contact) / ball.radius;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const double r = ball.radius * std::ldexp(1.0, -(i % kVerifyLevels));
    const Point h = r * n + uniformInBall(rng, Point(set.dim()), r);
    if (set.localMembership(ball.contact, h) != Membership::Outside) return false;
  }
  return true;
}

ExteriorBallResult findExteriorBall(const RegionSet& set, const Point& x, double maxRadius,
                                    const ExteriorBallOptions& options) {
  if (!(maxRadius > 0.0)) return {std::nullopt, "maxRadius must be positive"};
  if (!set.onBoundary(x)) return {std::nullopt, "point is not on the boundary"};
  const auto n = outwardNormal(set, x);
  if (!n) return {std::nullopt, "no candidate direction"};

  std::uint64_t probe = 0;
  auto check = [&](double r, int samples) {
    return verifyExteriorBall(set, TouchingBall{x + r * *n, r, x}, samples, deriveSeed(options.seed, ++probe));
  };

  double good = 0.0;
  if (check(maxRadius, options.searchSamples)) {
    good = maxRadius;
  } else {
    double lo = std::ldexp(maxRadius, -options.bisectionSteps);
    if (!check(lo, options.searchSamples)) return {std::nullopt, "no verified exterior ball"};
    double hi = maxRadius;
    // Tangent balls at x are nested, so the verified set of radii is an interval.
    for (int it = 0; it < options.bisectionSteps && hi / lo > 1.0 + 1e-3; ++it) {
      const double mid = std::sqrt(lo * hi);
      (check(mid, options.searchSamples) ? lo : hi) = mid;
    }
    good = lo;
  }
  for (int shrink = 0; shrink < 24; ++shrink, good *= 0.97) {
    if (check(good, options.finalSamples)) return {TouchingBall{x + good * *n, good, x}, ""};
  }
  return {std::nullopt, "final verification failed"};
}

}  // namespace nlgeom
