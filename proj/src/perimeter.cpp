#include "nlgeom/perimeter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlgeom/measure.hpp"
#include "nlgeom/parallel.hpp"
#include "nlgeom/rng.hpp"

namespace nlgeom {

namespace {

constexpr int kLinesPerTask = 128;
constexpr std::uint64_t kPerimeterStream = 0x706572ULL;
constexpr std::uint64_t kMinkowskiStream = 0x6d696eULL;
constexpr int kMinkowskiChunk = 8192;

// 3-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 3> kGaussX{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussW{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// ∫_a^b ∫_c^d (y - x)^{-1-s} dy dx for a < b <= c < d.
double pairIntegral(double a, double b, double c, double d, double s) {
  const double gap = c - b;
  if ((b - a) + (d - c) < 0.05 * gap) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * kGaussX[i];
      for (int j = 0; j < 3; ++j) {
        const double y = 0.5 * (c + d) + 0.5 * (d - c) * kGaussX[j];
        acc += kGaussW[i] * kGaussW[j] * std::pow(y - x, -1.0 - s);
      }
    }
    return acc * 0.25 * (b - a) * (d - c);
  }
  const double e = 1.0 - s;
  const double v = std::pow(c - a, e) - (gap > 0.0 ? std::pow(gap, e) : 0.0) - std::pow(d - a, e) + std::pow(d - b, e);
  return std::max(0.0, v / (s * e));
}

struct Piece {
  double lo, hi;
  bool inside;
  bool inOmega;
};

struct LineSums {
  double omegaOmega = 0.0;
  double omegaComplement = 0.0;
  double complementOmega = 0.0;
};

// Pieces of the window [w0, w1] split at the Omega segment [s0, s1].
std::vector<Piece> linePieces(const Chord& chord, double w0, double w1, double s0, double s1) {
  std::vector<double> cuts{w0};
  for (double t : chord.crossings) cuts.push_back(t);
  cuts.push_back(w1);
  std::vector<Piece> out;
  bool inside = chord.startsInside;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i, inside = !inside) {
    double lo = cuts[i];
    const double hi = cuts[i + 1];
    for (double cut : {s0, s1}) {
      if (cut > lo && cut < hi) {
        out.push_back({lo, cut, inside, lo >= s0 && cut <= s1});
        lo = cut;
      }
    }
    if (hi > lo) out.push_back({lo, hi, inside, lo >= s0 && hi <= s1});
  }
  return out;
}

LineSums lineSums(const std::vector<Piece>& pieces, double s, double kPlus, double kMinus) {
  LineSums out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (!p.inside) continue;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      const Piece& q = pieces[j];
      if (q.inside || !(p.inOmega || q.inOmega)) continue;
      const double v = j > i ? pairIntegral(p.lo, p.hi, q.lo, q.hi, s) : pairIntegral(q.lo, q.hi, p.lo, p.hi, s);
      if (p.inOmega && q.inOmega) {
        out.omegaOmega += v * (kPlus + kMinus);
        continue;
      }
      // x is the piece inside Omega; kPlus is K along +u, i.e. for x - y pointing along +u.
      const Piece& x = p.inOmega ? p : q;
      const Piece& y = p.inOmega ? q : p;
      const bool xAfter = x.lo >= y.hi;
      out.omegaComplement += v * (xAfter ? kPlus : kMinus);
      out.complementOmega += v * (xAfter ? kMinus : kPlus);
    }
  }
  return out;
}

Point directionFor(Rng& rng, int dim, int stratum, int strata) {
  if (dim == 2) {
    const double t = 2.0 * std::numbers::pi * (stratum + rng.uniform()) / strata;
    return Point{std::cos(t), std::sin(t)};
  }
  if (dim == 3) {
    const int nz = std::max(1, static_cast<int>(std::sqrt(strata / 2.0)));
    const int nphi = std::max(1, strata / nz);
    const int jz = (stratum / nphi) % nz, jp = stratum % nphi;
    const double z = -1.0 + 2.0 * (jz + rng.uniform()) / nz;
    const double phi = 2.0 * std::numbers::pi * (jp + rng.uniform()) / nphi;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Point{r * std::cos(phi), r * std::sin(phi), z};
  }
  return randomDirection(rng, dim);
}

// Uniform point of the (d-1)-disk of radius R orthogonal to u.
Point transversalOffset(Rng& rng, const Point& u, double R) {
  const int d = u.dim();
  if (d == 1) return Point(1);
  Point g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.normal();
  g = g - dot(g, u) * u;
  const double gn = norm(g);
  if (!(gn > 0.0)) return Point(d);
  return (R * std::pow(rng.uniform(), 1.0 / (d - 1)) / gn) * g;
}

double meanOf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double stdErrOf(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = meanOf(v);
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  return std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

PerimeterEstimate perimeterK(const RegionSet& set, const BallRegion& omega, const KernelSpec& kernel,
                             const QuadConfig& cfg) {
  cfg.validate();
  const int d = set.dim();
  if (kernel.dim() != d || omega.center.dim() != d) throw std::invalid_argument("perimeterK: dimension mismatch");
  if (!(omega.radius > 0.0)) throw std::invalid_argument("perimeterK: Omega radius must be positive");
  const double s = kernel.s();
  const double R = omega.radius;
  const double rho = cfg.outerRadius;
  // Per = 1/4 ∫_{S^{d-1}} ∫_{u^⊥} (ordered line sums) dp du; offsets are uniform in a disk of radius R.
  const double lineWeight = 0.25 * unitSphereArea(d) * unitBallVolume(d - 1) * std::pow(R, d - 1);

  auto evalLine = [&](const Point& u, const Point& p) {
    const double half = std::sqrt(std::max(0.0, R * R - norm2(p)));
    const Point o = omega.center + p;
    const double w0 = -half - rho, w1 = half + rho;
    const Chord chord = set.chord(o, u, w0, w1);
    return lineSums(linePieces(chord, w0, w1, -half, half), s, kernel.profile(u), kernel.profile(-u));
  };

  PerimeterEstimate out;
  out.tail = ballVolume(d, R) * tailBound(kernel, rho);
  if (d == 1) {
    const LineSums a = evalLine(Point{1.0}, Point(1));
    const LineSums b = evalLine(Point{-1.0}, Point(1));
    // Both orientations of the single line: 1/4 * |S^0| * mean = 1/4 * (a + b).
    out.omegaOmega = 0.25 * (a.omegaOmega + b.omegaOmega);
    out.omegaComplement = 0.25 * (a.omegaComplement + b.omegaComplement);
    out.complementOmega = 0.25 * (a.complementOmega + b.complementOmega);
    out.value = out.omegaOmega + out.omegaComplement + out.complementOmega;
    return out;
  }

  const int reps = std::max(2, cfg.replicates);
  const int linesPerRep = std::max(kLinesPerTask, cfg.samplesPerShell / reps);
  const int tasksPerRep = (linesPerRep + kLinesPerTask - 1) / kLinesPerTask;
  std::vector<LineSums> taskSums(static_cast<std::size_t>(reps) * tasksPerRep);
  forEachTask(taskSums.size(), cfg.exec, [&](std::size_t t) {
    Rng rng(deriveSeed(cfg.seed, kPerimeterStream, t));
    LineSums acc;
    for (int i = 0; i < kLinesPerTask; ++i) {
      const Point u = directionFor(rng, d, i, kLinesPerTask);
      const Point p = transversalOffset(rng, u, R);
      const LineSums ls = evalLine(u, p);
      acc.omegaOmega += ls.omegaOmega;
      acc.omegaComplement += ls.omegaComplement;
      acc.complementOmega += ls.complementOmega;
    }
    taskSums[t] = acc;
  });
  std::vector<double> oo(reps), oc(reps), co(reps), tot(reps);
  const double perLine = lineWeight / (static_cast<double>(tasksPerRep) * kLinesPerTask);
  for (int r = 0; r < reps; ++r) {
    for (int k = 0; k < tasksPerRep; ++k) {
      const LineSums& ls = taskSums[static_cast<std::size_t>(r) * tasksPerRep + k];
      oo[r] += ls.omegaOmega * perLine;
      oc[r] += ls.omegaComplement * perLine;
      co[r] += ls.complementOmega * perLine;
    }
    tot[r] = oo[r] + oc[r] + co[r];
  }
  out.omegaOmega = meanOf(oo);
  out.omegaComplement = meanOf(oc);
  out.complementOmega = meanOf(co);
  out.value = meanOf(tot);
  out.statError = stdErrOf(tot);
  out.omegaOmegaError = stdErrOf(oo);
  out.crossError = std::max(stdErrOf(oc), stdErrOf(co));
  out.lowPrecision = out.statError > cfg.tolRel * out.value;
  return out;
}

ScalingRatio perimeterScalingCheck(const RegionSet& set, const BallRegion& omega, double r, double s,
                                   const QuadConfig& cfg) {
  if (!(r > 0.0)) throw std::invalid_argument("perimeterScalingCheck: r must be positive");
  const int d = set.dim();
  const KernelSpec k = fractionalKernel(d, s);
  const PerimeterEstimate base = perimeterK(set, omega, k, cfg);
  QuadConfig scaledCfg = cfg;
  scaledCfg.outerRadius = cfg.outerRadius * r;
  scaledCfg.seed = deriveSeed(cfg.seed, 0x5ca1e);
  const PerimeterEstimate scaled = perimeterK(set.scaled(r), BallRegion{r * omega.center, r * omega.radius}, k, scaledCfg);
  if (!(base.value > 0.0)) throw std::runtime_error("perimeterScalingCheck: perimeter of E is zero");
  ScalingRatio out;
  out.ratio = scaled.value / base.value;
  out.statError = out.ratio * std::hypot(scaled.statError / scaled.value, base.statError / base.value);
  out.expected = std::pow(r, d - s);
  return out;
}

MinkowskiEstimate classicalPerimeterMinkowski(const RegionSet& set, const BallRegion& omega, double h,
                                              const QuadConfig& cfg, int samples) {
  if (!(h > 0.0)) throw std::invalid_argument("classicalPerimeterMinkowski: h must be positive");
  if (samples < 100) throw std::invalid_argument("classicalPerimeterMinkowski: need at least 100 samples");
  const int d = set.dim();
  const bool exactDistance = set.signIsDistance();
  auto nearBoundary = [&](Rng& rng, const Point& x) {
    const double sg = set.sign(x);
    if (std::abs(sg) >= h) return false;
    if (exactDistance) return true;
    // sign only brackets the distance here; look for a crossing within h.
    for (int i = 0; i < 2 * d + 16; ++i) {
      Point u = i < 2 * d ? (i % 2 == 0 ? 1.0 : -1.0) * Point::unit(d, i / 2) : randomDirection(rng, d);
      if (!set.chord(x, u, 0.0, h).crossings.empty()) return true;
    }
    return false;
  };
  const int chunks = (samples + kMinkowskiChunk - 1) / kMinkowskiChunk;
  std::vector<long long> hits(chunks);
  forEachTask(chunks, cfg.exec, [&](std::size_t c) {
    Rng rng(deriveSeed(cfg.seed, kMinkowskiStream, c));
    const int n = std::min(kMinkowskiChunk, samples - static_cast<int>(c) * kMinkowskiChunk);
    long long k = 0;
    for (int i = 0; i < n; ++i) {
      if (nearBoundary(rng, uniformInBall(rng, omega.center, omega.radius))) ++k;
    }
    hits[c] = k;
  });
  long long total = 0;
  for (long long k : hits) total += k;
  const double frac = static_cast<double>(total) / samples;
  const double vol = ballVolume(d, omega.radius);
  MinkowskiEstimate out;
  out.value = vol * frac / (2.0 * h);
  out.statError = vol * std::sqrt(frac * (1.0 - frac) / samples) / (2.0 * h);
  out.reliable = h <= set.featureScale();
  return out;
}

}  // namespace nlgeom
