#include "nlgeom/quad.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nlgeom/measure.hpp"
#include "nlgeom/rng.hpp"

namespace nlgeom {

namespace {

constexpr std::uint64_t kVolumeStream = 0x766f6cULL;
constexpr int kVolumeChunk = 4096;

struct Strata {
  int radial = 1;
  int a = 1;  // first angular factor (sign for d=1, theta for d=2, z for d=3)
  int b = 1;  // second angular factor (phi for d=3)
};

Strata strataFor(int dim, int perReplicate) {
  Strata st;
  if (dim == 1) {
    st.a = 2;
    st.radial = std::max(1, perReplicate / 2);
  } else if (dim == 2) {
    st.radial = perReplicate >= 8 ? 4 : 1;
    st.a = std::max(1, perReplicate / st.radial);
  } else if (dim == 3) {
    st.radial = perReplicate >= 8 ? 4 : 1;
    const int ang = std::max(1, perReplicate / st.radial);
    st.a = std::max(1, static_cast<int>(std::sqrt(ang / 2.0)));
    st.b = std::max(1, ang / st.a);
  } else {
    st.radial = perReplicate;
  }
  return st;
}

Point stratifiedDirection(Rng& rng, int dim, const Strata& st, int ja, int jb) {
  Point u(dim);
  if (dim == 1) {
    u[0] = ja == 0 ? -1.0 : 1.0;
  } else if (dim == 2) {
    const double t = 2.0 * std::numbers::pi * (ja + rng.uniform()) / st.a;
    u[0] = std::cos(t);
    u[1] = std::sin(t);
  } else if (dim == 3) {
    const double z = -1.0 + 2.0 * (ja + rng.uniform()) / st.a;
    const double phi = 2.0 * std::numbers::pi * (jb + rng.uniform()) / st.b;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    u[0] = rho * std::cos(phi);
    u[1] = rho * std::sin(phi);
    u[2] = z;
  } else {
    u = randomDirection(rng, dim);
  }
  return u;
}

[[noreturn]] void nonFinite(const Point& x, const Point& h, double value) {
  throw std::runtime_error("shellIntegrate: non-finite integrand value " + std::to_string(value) + " at y = x + h, x = [" +
                           formatPoint(x) + "], h = [" + formatPoint(h) + "], |h| = " + std::to_string(norm(h)));
}

}  // namespace

std::vector<double> QuadConfig::epsSchedule() const {
  std::vector<double> eps(kMax + 1);
  for (int k = 0; k <= kMax; ++k) eps[k] = std::ldexp(eps0, -k);
  return eps;
}

void QuadConfig::validate() const {
  if (!(eps0 > 0.0) || !(eps0 < outerRadius)) throw std::invalid_argument("QuadConfig: need 0 < eps0 < outerRadius");
  if (kMax < 4) throw std::invalid_argument("QuadConfig: kMax must be >= 4");
  if (samplesPerShell < 100) throw std::invalid_argument("QuadConfig: samplesPerShell must be >= 100");
  if (replicates < 2) throw std::invalid_argument("QuadConfig: replicates must be >= 2");
  if (volumeSamples < 100) throw std::invalid_argument("QuadConfig: volumeSamples must be >= 100");
  if (!(tolAbs > 0.0) || !(tolRel > 0.0)) throw std::invalid_argument("QuadConfig: tolerances must be positive");
}

nlohmann::json QuadConfig::toJson() const {
  return {{"eps0", eps0},
          {"kMax", kMax},
          {"outerRadius", outerRadius},
          {"samplesPerShell", samplesPerShell},
          {"replicates", replicates},
          {"volumeSamples", volumeSamples},
          {"seed", seed},
          {"tolAbs", tolAbs},
          {"tolRel", tolRel}};
}

QuadConfig QuadConfig::fromJson(const nlohmann::json& j) {
  QuadConfig c;
  try {
    c.eps0 = j.value("eps0", c.eps0);
    c.kMax = j.value("kMax", c.kMax);
    c.outerRadius = j.value("outerRadius", c.outerRadius);
    c.samplesPerShell = j.value("samplesPerShell", c.samplesPerShell);
    c.replicates = j.value("replicates", c.replicates);
    c.volumeSamples = j.value("volumeSamples", c.volumeSamples);
    c.seed = j.value("seed", c.seed);
    c.tolAbs = j.value("tolAbs", c.tolAbs);
    c.tolRel = j.value("tolRel", c.tolRel);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("QuadConfig: ") + e.what());
  }
  c.validate();
  return c;
}

ShellIntegral shellIntegrate(const OffsetIntegrand& f, const Point& x, double inner, double outer,
                             const QuadConfig& cfg, const ShellOptions& options) {
  if (!(inner >= 0.0) || !(outer > inner)) throw std::invalid_argument("shellIntegrate: need 0 <= inner < outer");
  if (inner == 0.0 && !std::isfinite(outer)) throw std::invalid_argument("shellIntegrate: unbounded ball");
  const int d = x.dim();
  const int R = std::max(2, cfg.replicates);
  const Strata st = strataFor(d, std::max(1, cfg.samplesPerShell / R));
  const double s = options.s;
  const double sphere = unitSphereArea(d);
  const bool uniformBall = inner == 0.0;
  const double aPow = uniformBall ? 0.0 : std::pow(inner, -s);
  const double bPow = std::isfinite(outer) ? std::pow(outer, -s) : 0.0;
  const double radialMass = uniformBall ? ballVolume(d, outer) : sphere * (aPow - bPow) / s;

  std::vector<double> means(R);
  for (int rep = 0; rep < R; ++rep) {
    Rng rng(deriveSeed(cfg.seed, options.stream, options.shellIndex, rep));
    double acc = 0.0;
    long long n = 0;
    for (int ir = 0; ir < st.radial; ++ir) {
      for (int ja = 0; ja < st.a; ++ja) {
        for (int jb = 0; jb < st.b; ++jb) {
          const double u = (ir + rng.uniform()) / st.radial;
          double r, w;
          if (uniformBall) {
            r = outer * std::pow(u, 1.0 / d);
            w = radialMass;
          } else {
            r = std::pow(aPow - u * (aPow - bPow), -1.0 / s);
            w = radialMass * std::pow(r, d + s);
          }
          const Point h = r * stratifiedDirection(rng, d, st, ja, jb);
          const double v = f(h);
          if (!std::isfinite(v)) nonFinite(x, h, v);
          acc += w * v;
          ++n;
        }
      }
    }
    means[rep] = acc / static_cast<double>(n);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= R;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (R - 1);
  return ShellIntegral{inner, outer, mean, std::sqrt(var / R)};
}

// Orthonormal vectors spanning the complement of the unit vector n (d = 2, 3).
std::vector<Point> tangentBasis(const Point& n) {
  const int d = n.dim();
  std::vector<Point> out;
  if (d == 2) {
    out.push_back(Point{-n[1], n[0]});
    return out;
  }
  int k = 0;
  for (int i = 1; i < d; ++i) {
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  }
  Point e = Point::unit(d, k);
  Point t1 = normalized(e - dot(e, n) * n);
  out.push_back(t1);
  if (d == 3) {
    out.push_back(Point{n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0]});
  }
  return out;
}

ShellIntegral rayShellIntegrate(const RayIntegrand& g, int dim, double inner, double outer, const QuadConfig& cfg,
                                const ShellOptions& options) {
  if (!(inner >= 0.0) || !(outer > inner)) throw std::invalid_argument("rayShellIntegrate: need 0 <= inner < outer");
  const double sphere = unitSphereArea(dim);
  auto checked = [&](const Point& u) {
    const double v = g(u, inner, outer);
    if (!std::isfinite(v)) nonFinite(Point(dim), inner * u, v);
    return v;
  };
  if (dim == 1) {
    const double v = checked(Point{1.0}) + checked(Point{-1.0});
    return ShellIntegral{inner, outer, v, 0.0};
  }
  const int R = std::max(2, cfg.replicates);
  const int perRep = std::max(2, cfg.samplesPerShell / R);
  const bool focused = options.focusAngle > 0.0 && options.focusNormal.dim() == dim;
  const int n2 = focused ? perRep / 2 : 0;
  const int n1 = perRep - n2;
  const Point& n = options.focusNormal;
  Strata st = strataFor(dim, n1);
  st.a *= st.radial;
  st.radial = 1;
  if (dim > 3) st.a = n1;

  const double psiMax = focused ? std::min(options.focusAngle, 0.5 * std::numbers::pi) : 0.0;
  const double tangentSphere = dim > 1 ? unitSphereArea(dim - 1) : 0.0;
  const std::vector<Point> basis = focused && dim <= 3 ? tangentBasis(n) : std::vector<Point>{};
  // Focused directions: psi stratified, tangent part stratified (d <= 3) or random.
  int psiStrata = 1, tanStrata = 1;
  if (focused) {
    if (dim == 2) {
      tanStrata = 2;
    } else if (dim == 3) {
      tanStrata = std::max(1, static_cast<int>(std::sqrt(2.0 * n2)));
    }
    psiStrata = std::max(1, n2 / tanStrata);
  }
  const double m1 = static_cast<double>(st.a) * st.b;
  const double m2 = focused ? static_cast<double>(psiStrata) * tanStrata : 0.0;
  auto mixtureDensity = [&](const Point& u) {
    double p = m1 / sphere;
    if (focused) {
      const double psi = std::asin(std::clamp(dot(u, n), -1.0, 1.0));
      if (std::abs(psi) < psiMax) p += m2 / (2.0 * psiMax * tangentSphere * std::pow(std::cos(psi), dim - 2));
    }
    return p;
  };

  std::vector<double> means(R);
  for (int rep = 0; rep < R; ++rep) {
    Rng rng(deriveSeed(cfg.seed, options.stream, options.shellIndex, rep));
    double acc = 0.0;
    for (int ja = 0; ja < st.a; ++ja) {
      for (int jb = 0; jb < st.b; ++jb) {
        const Point u = dim > 3 ? randomDirection(rng, dim) : stratifiedDirection(rng, dim, st, ja, jb);
        acc += checked(u) / mixtureDensity(u);
      }
    }
    for (int jp = 0; focused && jp < psiStrata; ++jp) {
      for (int jt = 0; jt < tanStrata; ++jt) {
        const double psi = psiMax * (-1.0 + 2.0 * (jp + rng.uniform()) / psiStrata);
        Point tau(dim);
        if (dim == 2) {
          tau = (jt == 0 ? 1.0 : -1.0) * basis[0];
        } else if (dim == 3) {
          const double phi = 2.0 * std::numbers::pi * (jt + rng.uniform()) / tanStrata;
          tau = std::cos(phi) * basis[0] + std::sin(phi) * basis[1];
        } else {
          const Point r = randomDirection(rng, dim);
          tau = normalized(r - dot(r, n) * n);
        }
        const Point u = normalized(std::cos(psi) * tau + std::sin(psi) * n);
        acc += checked(u) / mixtureDensity(u);
      }
    }
    means[rep] = acc;
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= R;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (R - 1);
  return ShellIntegral{inner, outer, mean, std::sqrt(var / R)};
}

std::vector<ShellIntegral> integrateShells(const OffsetIntegrand& f, const Point& x,
                                           const std::vector<double>& radii, const QuadConfig& cfg,
                                           double s, std::uint64_t stream) {
  if (radii.size() < 2) return {};
  std::vector<ShellIntegral> out(radii.size() - 1);
  forEachTask(out.size(), cfg.exec, [&](std::size_t i) {
    const double a = std::min(radii[i], radii[i + 1]);
    const double b = std::max(radii[i], radii[i + 1]);
    out[i] = shellIntegrate(f, x, a, b, cfg, ShellOptions{s, stream, i, Point(), 0.0});
  });
  return out;
}

double tailBound(const KernelSpec& kernel, double truncation) {
  if (!(truncation > 0.0)) throw std::invalid_argument("tailBound: truncation must be positive");
  const int d = kernel.dim();
  return kernel.Lambda() * unitSphereArea(d) * std::pow(truncation, -kernel.s()) / kernel.s();
}

VolumeFraction volumeFraction(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                              std::uint64_t stream) {
  if (!(r > 0.0)) throw std::invalid_argument("volumeFraction: radius must be positive");
  const int total = cfg.volumeSamples;
  const int chunks = (total + kVolumeChunk - 1) / kVolumeChunk;
  std::vector<long long> inside(chunks), boundary(chunks);
  forEachTask(chunks, cfg.exec, [&](std::size_t c) {
    Rng rng(deriveSeed(cfg.seed, kVolumeStream ^ stream, c));
    const int n = std::min(kVolumeChunk, total - static_cast<int>(c) * kVolumeChunk);
    long long in = 0, on = 0;
    for (int i = 0; i < n; ++i) {
      const Membership m = set.membership(uniformInBall(rng, center, r));
      if (m == Membership::Inside) ++in;
      if (m == Membership::Boundary) ++on;
    }
    inside[c] = in;
    boundary[c] = on;
  });
  long long in = 0, on = 0;
  for (int c = 0; c < chunks; ++c) {
    in += inside[c];
    on += boundary[c];
  }
  VolumeFraction out;
  out.value = static_cast<double>(in) / total;
  out.boundaryFraction = static_cast<double>(on) / total;
  out.error = std::sqrt(out.value * (1.0 - out.value) / total);
  out.boundaryError = std::sqrt(out.boundaryFraction * (1.0 - out.boundaryFraction) / total);
  return out;
}

}  // namespace nlgeom
