#include "nlgeom/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "nlgeom/point.hpp"

namespace nlgeom {

namespace {

// ∫_0^phi sin^n(t) dt by the standard reduction formula.
double sinPowerIntegral(int n, double phi) {
  if (n == 0) return phi;
  if (n == 1) return 1.0 - std::cos(phi);
  const double s = std::sin(phi);
  return -std::pow(s, n - 1) * std::cos(phi) / n + (n - 1.0) / n * sinPowerIntegral(n - 2, phi);
}

}  // namespace

double unitBallVolume(int dim) {
  if (dim < 0) throw std::invalid_argument("unitBallVolume: negative dimension");
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double unitSphereArea(int dim) { return dim * unitBallVolume(dim); }

double ballVolume(int dim, double radius) { return unitBallVolume(dim) * std::pow(radius, dim); }

double capVolume(int dim, double radius, double height) {
  if (height <= 0.0) return 0.0;
  if (height >= 2.0 * radius) return ballVolume(dim, radius);
  const double c = std::clamp((radius - height) / radius, -1.0, 1.0);
  return unitBallVolume(dim - 1) * std::pow(radius, dim) * sinPowerIntegral(dim, std::acos(c));
}

double lensVolume(int dim, double a, double b, double separation) {
  const double dist = std::abs(separation);
  if (a <= 0.0 || b <= 0.0 || dist >= a + b) return 0.0;
  if (dist <= std::abs(a - b)) return ballVolume(dim, std::min(a, b));
  const double ta = (dist * dist + a * a - b * b) / (2.0 * dist);
  const double tb = dist - ta;
  return capVolume(dim, a, a - ta) + capVolume(dim, b, b - tb);
}

std::string formatPoint(const Point& p) {
  std::string out;
  char buf[40];
  for (int i = 0; i < p.dim(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    if (i) out += ';';
    out += buf;
  }
  return out;
}

}  // namespace nlgeom
