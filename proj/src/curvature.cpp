#include "nlgeom/curvature.hpp"

#include "shape_detail.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nlgeom {

namespace {

constexpr std::uint64_t kNearStream = 11;
constexpr std::uint64_t kFarStream = 12;
constexpr std::uint64_t kGapNearStream = 13;
constexpr std::uint64_t kGapFarStream = 14;
constexpr std::uint64_t kTruncStream = 15;
constexpr int kMinGrowthShells = 4;

double chiOf(Membership m) {
  switch (m) {
    case Membership::Outside:
      return 1.0;
    case Membership::Inside:
      return -1.0;
    case Membership::Boundary:
      return 0.0;
  }
  return 0.0;
}

double radialMass(double a, double b, double s) {
  return (std::pow(a, -s) - (std::isfinite(b) ? std::pow(b, -s) : 0.0)) / s;
}

// ∫ t^{-1-s} over the Inside segments of the chord within (a, b).
double insideMass(const Chord& c, double a, double b, double s) {
  double acc = 0.0;
  bool in = c.startsInside;
  double from = a;
  for (double t : c.crossings) {
    if (in) acc += radialMass(from, t, s);
    in = !in;
    from = t;
  }
  if (in) acc += radialMass(from, b, s);
  return acc;
}

std::vector<std::pair<double, double>> insideIntervals(const Chord& c, double a, double b) {
  std::vector<std::pair<double, double>> out;
  bool in = c.startsInside;
  double from = a;
  for (double t : c.crossings) {
    if (in) out.emplace_back(from, t);
    in = !in;
    from = t;
  }
  if (in) out.emplace_back(from, b);
  return out;
}

// Rays are exact but cost one chord each; beyond this radius the number of
// crossings per ray can grow without bound, so shells fall back to point sampling.
double rayLimit(const RegionSet& set) {
  const double fs = set.featureScale();
  return std::isfinite(fs) ? 256.0 * fs : std::numeric_limits<double>::infinity();
}

// Directions near the tangent plane carry the near field of a smooth boundary:
// at radius t only elevations below about t / (2 * curvature radius) contribute.
struct Focus {
  std::optional<Point> normal;
  double scale = std::numeric_limits<double>::infinity();
};

Focus focusAt(const RegionSet& set, const Point& x, double scale) {
  Focus f;
  if (std::isfinite(scale)) {
    f.normal = outwardNormal(set, x);
    f.scale = scale;
  }
  return f;
}

std::vector<ShellIntegral> integrateHybrid(const RayIntegrand& ray, const OffsetIntegrand& point, const Point& x,
                                           const std::vector<double>& radii, double limit, const QuadConfig& cfg,
                                           double s, std::uint64_t stream, const Focus& focus = {}) {
  if (radii.size() < 2) return {};
  std::vector<ShellIntegral> out(radii.size() - 1);
  forEachTask(out.size(), cfg.exec, [&](std::size_t i) {
    const double a = std::min(radii[i], radii[i + 1]);
    const double b = std::max(radii[i], radii[i + 1]);
    ShellOptions opt{s, stream, i, Point(), 0.0};
    if (focus.normal && 2.0 * b < focus.scale * std::numbers::pi) {
      opt.focusNormal = *focus.normal;
      opt.focusAngle = 2.0 * b / focus.scale;
    }
    out[i] = b <= limit ? rayShellIntegrate(ray, x.dim(), a, b, cfg, opt) : shellIntegrate(point, x, a, b, cfg, opt);
  });
  return out;
}

std::vector<double> dyadicOutward(double from, double to) {
  std::vector<double> radii{from};
  while (radii.back() < to) radii.push_back(std::min(2.0 * radii.back(), to));
  return radii;
}

struct ShellSummary {
  double sum = 0.0;
  double var = 0.0;
  double absSum = 0.0;
};

// Floating-point allowance for sums of shell values.
double rounding(const ShellSummary& a, const ShellSummary& b = {}) { return 1e-12 * (a.absSum + b.absSum); }

ShellSummary summarize(const std::vector<ShellIntegral>& shells) {
  ShellSummary out;
  for (const auto& sh : shells) {
    out.sum += sh.value;
    out.var += sh.statError * sh.statError;
    out.absSum += std::abs(sh.value);
  }
  return out;
}

bool significant(const ShellIntegral& sh, double sgn) {
  return sgn * sh.value > 3.0 * sh.statError && sgn * sh.value > 0.0;
}

// Least-squares slope of -log|v| against log eps over the trailing run of
// significant shells of sign sgn; nullopt when the run is shorter than the minimum.
std::optional<double> trailingGrowth(const std::vector<ShellIntegral>& shells, double sgn) {
  int n = 0;
  for (auto it = shells.rbegin(); it != shells.rend() && significant(*it, sgn); ++it) ++n;
  if (n < kMinGrowthShells) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = shells.size() - n; i < shells.size(); ++i) {
    const double x = std::log(shells[i].outer);
    const double y = std::log(sgn * shells[i].value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

double remainderEstimate(const std::vector<ShellIntegral>& near, double s) {
  const double q = std::pow(2.0, -(1.0 - s));
  const std::size_t K = near.size();
  double m = std::abs(near[K - 1].value) + 3.0 * near[K - 1].statError;
  if (K >= 2) m = std::max(m, q * std::abs(near[K - 2].value));
  if (K >= 3) m = std::max(m, q * q * std::abs(near[K - 3].value));
  return m * q / (1.0 - q);
}

// scale: magnitude of terms that cancel in the sum, so a near-zero total is judged against it.
bool partialSumsSettled(const std::vector<double>& S, const QuadConfig& cfg, double scale = 0.0) {
  if (S.size() < 3) return false;
  const double last = S.back();
  const double tol = cfg.tolAbs + cfg.tolRel * std::max(std::abs(last), scale);
  return std::abs(last - S[S.size() - 2]) <= tol && std::abs(last - S[S.size() - 3]) <= tol;
}

}  // namespace

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::Converged:
      return "Converged";
    case Verdict::DivergedPlus:
      return "Diverged(+inf)";
    case Verdict::DivergedMinus:
      return "Diverged(-inf)";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

double ballCurvatureExact(int dim, double s) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("ballCurvatureExact: dimension out of range");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("ballCurvatureExact: s must lie in (0, 1)");
  const double h = std::pow(2.0, 1.0 - s) * std::pow(std::numbers::pi, 0.5 * (dim - 1)) *
                   std::tgamma(0.5 * (1.0 - s)) / (s * std::tgamma(0.5 * (dim - s)));
  if (dim == 1) {
    const double direct = std::pow(2.0, 1.0 - s) / s;
    if (std::abs(h - direct) > 1e-12 * direct) throw std::logic_error("ballCurvatureExact: d = 1 cross-check failed");
  }
  return h;
}

PvEstimate curvaturePV(const RegionSet& set, const KernelSpec& kernel, const Point& x, const QuadConfig& cfg) {
  cfg.validate();
  if (kernel.dim() != set.dim() || x.dim() != set.dim()) throw std::invalid_argument("curvaturePV: dimension mismatch");
  if (!set.onBoundary(x)) {
    throw std::invalid_argument("curvaturePV: x = [" + formatPoint(x) + "] is not on the boundary");
  }
  const double s = kernel.s();
  const OffsetIntegrand f = [&](const Point& h) {
    const double c = chiOf(set.localMembership(x, h)) + chiOf(set.localMembership(x, -h));
    return c == 0.0 ? 0.0 : 0.5 * c * kernel.evaluate(h);
  };

  const RayIntegrand g = [&](const Point& u, double a, double b) {
    const double in = insideMass(set.localChord(x, u, a, b), a, b, s) + insideMass(set.localChord(x, -u, a, b), a, b, s);
    return kernel.profile(u) * (radialMass(a, b, s) - in);
  };
  const double limit = rayLimit(set);

  PvEstimate out;
  const Focus focus = focusAt(set, x, set.featureScale());
  out.nearField = integrateHybrid(g, f, x, cfg.epsSchedule(), limit, cfg, s, kNearStream, focus);
  const auto far =
      integrateHybrid(g, f, x, dyadicOutward(cfg.eps0, cfg.outerRadius), limit, cfg, s, kFarStream, focus);
  const ShellSummary farSum = summarize(far);
  const ShellSummary nearSum = summarize(out.nearField);
  out.farField = farSum.sum;
  out.farFieldError = std::sqrt(farSum.var);
  out.tail = tailBound(kernel, cfg.outerRadius);

  out.partialSums.push_back(out.farField);
  for (const auto& sh : out.nearField) out.partialSums.push_back(out.partialSums.back() + sh.value);

  out.innerRemainder = remainderEstimate(out.nearField, s);
  out.errorBound =
      3.0 * std::sqrt(farSum.var + nearSum.var) + out.tail + out.innerRemainder + rounding(farSum, nearSum);

  const auto up = trailingGrowth(out.nearField, 1.0);
  const auto down = trailingGrowth(out.nearField, -1.0);
  out.value = std::numeric_limits<double>::quiet_NaN();
  if (up && *up >= 0.5 * s) {
    out.verdict = Verdict::DivergedPlus;
    out.growthExponent = *up;
  } else if (down && *down >= 0.5 * s) {
    out.verdict = Verdict::DivergedMinus;
    out.growthExponent = *down;
  } else {
    out.growthExponent = up ? *up : (down ? *down : 0.0);
    if (partialSumsSettled(out.partialSums, cfg)) {
      out.verdict = Verdict::Converged;
      out.value = out.partialSums.back();
    }
  }
  return out;
}

PvEstimate curvatureViaTouchingBall(const RegionSet& set, const KernelSpec& kernel, const TouchingBall& tb,
                                    const QuadConfig& cfg, const TouchingBallOptions& options) {
  cfg.validate();
  if (kernel.dim() != set.dim() || tb.center.dim() != set.dim()) {
    throw std::invalid_argument("curvatureViaTouchingBall: dimension mismatch");
  }
  if (std::abs(distance(tb.center, tb.contact) - tb.radius) > 1e-9 * tb.radius) {
    throw std::invalid_argument("curvatureViaTouchingBall: contact point is not on the ball's sphere");
  }
  if (!verifyExteriorBall(set, tb, options.verifySamples, deriveSeed(cfg.seed, 0xba11))) {
    throw std::invalid_argument("curvatureViaTouchingBall: ball fails disjointness verification");
  }
  const double s = kernel.s();
  const Point& x = tb.contact;
  const RegionSet B = ball(tb.center, tb.radius);

  PvEstimate out;
  double hB = 0.0, hBerr = 0.0;
  if (kernel.kind() == KernelKind::Fractional) {
    hB = std::pow(tb.radius, -s) * ballCurvatureExact(set.dim(), s);
  } else {
    const PvEstimate pb = curvaturePV(B, kernel, x, cfg);
    if (pb.verdict != Verdict::Converged) {
      out.verdict = Verdict::Inconclusive;
      out.value = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    hB = pb.value;
    hBerr = pb.errorBound;
  }
  out.ballTerm = -hB;
  out.ballTermError = hBerr;

  const OffsetIntegrand g = [&](const Point& h) {
    if (B.localMembership(x, h) != Membership::Outside) return 0.0;
    if (set.localMembership(x, h) != Membership::Outside) return 0.0;
    return 2.0 * kernel.evaluate(h);
  };
  const RayIntegrand gr = [&](const Point& u, double a, double b) {
    auto ivs = insideIntervals(set.localChord(x, u, a, b), a, b);
    for (const auto& iv : insideIntervals(B.localChord(x, u, a, b), a, b)) ivs.push_back(iv);
    const Chord inside = detail::chordFromIntervals(std::move(ivs), a, b);
    return 2.0 * kernel.profile(u) * (radialMass(a, b, s) - insideMass(inside, a, b, s));
  };
  const double limit = std::min(rayLimit(set), rayLimit(B));
  Focus focus;
  focus.normal = normalized(x - tb.center);
  focus.scale = std::min(set.featureScale(), tb.radius);
  out.nearField = integrateHybrid(gr, g, x, cfg.epsSchedule(), limit, cfg, s, kGapNearStream, focus);
  const auto far =
      integrateHybrid(gr, g, x, dyadicOutward(cfg.eps0, cfg.outerRadius), limit, cfg, s, kGapFarStream, focus);
  const ShellSummary farSum = summarize(far);
  const ShellSummary nearSum = summarize(out.nearField);
  out.farField = farSum.sum;
  out.farFieldError = std::sqrt(farSum.var);
  out.tail = 2.0 * tailBound(kernel, cfg.outerRadius);

  out.partialSums.push_back(out.ballTerm + out.farField);
  for (const auto& sh : out.nearField) out.partialSums.push_back(out.partialSums.back() + sh.value);
  out.innerRemainder = remainderEstimate(out.nearField, s);
  out.errorBound = hBerr + 3.0 * std::sqrt(farSum.var + nearSum.var) + out.tail + out.innerRemainder +
                   rounding(farSum, nearSum) + 1e-12 * std::abs(hB);

  const auto up = trailingGrowth(out.nearField, 1.0);
  out.growthExponent = up ? *up : 0.0;
  out.value = std::numeric_limits<double>::quiet_NaN();
  const double gap = out.partialSums.back() - out.ballTerm;
  if (up && *up >= 0.5 * s && gap > options.ceilingFactor * std::abs(hB)) {
    out.verdict = Verdict::DivergedPlus;
  } else if (!(up && *up >= 0.5 * s) && partialSumsSettled(out.partialSums, cfg, std::abs(hB))) {
    out.verdict = Verdict::Converged;
    out.value = out.partialSums.back();
  } else {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

TruncatedIntegral annulusChiIntegral(const RegionSet& set, const KernelSpec& kernel, const Point& x, double inner,
                                     double outer, const QuadConfig& cfg) {
  if (!(inner > 0.0) || !(outer > inner)) throw std::invalid_argument("annulusChiIntegral: need 0 < inner < outer");
  if (kernel.dim() != set.dim() || x.dim() != set.dim()) {
    throw std::invalid_argument("annulusChiIntegral: dimension mismatch");
  }
  const double s = kernel.s();
  const bool anchored = set.onBoundary(x);
  auto chi = [&](const Point& h) {
    return chiOf(anchored ? set.localMembership(x, h) : set.membership(x + h));
  };
  const OffsetIntegrand f = [&](const Point& h) {
    const double c = chi(h) + chi(-h);
    return c == 0.0 ? 0.0 : 0.5 * c * kernel.evaluate(h);
  };
  auto chordAlong = [&](const Point& u, double a, double b) {
    return anchored ? set.localChord(x, u, a, b) : set.chord(x, u, a, b);
  };
  const RayIntegrand g = [&](const Point& u, double a, double b) {
    const double in = insideMass(chordAlong(u, a, b), a, b, s) + insideMass(chordAlong(-u, a, b), a, b, s);
    return kernel.profile(u) * (radialMass(a, b, s) - in);
  };
  const auto shells = integrateHybrid(g, f, x, dyadicOutward(inner, outer), rayLimit(set), cfg, s, kTruncStream);
  const ShellSummary sum = summarize(shells);
  TruncatedIntegral out;
  out.value = sum.sum;
  out.statError = std::sqrt(sum.var);
  out.errorBound = 3.0 * out.statError + rounding(sum);
  return out;
}

TruncatedIntegral curvatureLowerBoundTruncated(const RegionSet& set, const KernelSpec& kernel, const Point& x,
                                               double r, const QuadConfig& cfg) {
  cfg.validate();
  if (!(r > 0.0)) throw std::invalid_argument("curvatureLowerBoundTruncated: r must be positive");
  if (kernel.dim() != set.dim() || x.dim() != set.dim()) {
    throw std::invalid_argument("curvatureLowerBoundTruncated: dimension mismatch");
  }
  TruncatedIntegral out;
  if (r < cfg.outerRadius) out = annulusChiIntegral(set, kernel, x, r, cfg.outerRadius, cfg);
  out.tail = tailBound(kernel, std::max(r, cfg.outerRadius));
  out.errorBound += out.tail;
  return out;
}

}  // namespace nlgeom
