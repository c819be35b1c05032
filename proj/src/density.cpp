#include "nlgeom/density.hpp"

#include "shape_detail.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlgeom/measure.hpp"
#include "nlgeom/perimeter.hpp"

namespace nlgeom {

namespace {

constexpr std::uint64_t kProfileStream = 21;
constexpr std::uint64_t kGridStream = 22;
constexpr std::uint64_t kRearrangeStream = 23;
constexpr std::uint64_t kPreconditionStream = 24;
constexpr std::uint64_t kScanStream = 25;
constexpr std::uint64_t kIdentityStream = 26;
constexpr double kMaxPiecesPerLine = 256.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json estimateJson(const Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }

nlohmann::json truncatedJson(const TruncatedIntegral& t) {
  return {{"value", t.value}, {"statError", t.statError}, {"tail", t.tail}, {"errorBound", t.errorBound}};
}

nlohmann::json pvJson(const PvEstimate& p) {
  return {{"verdict", verdictName(p.verdict)},
          {"value", std::isfinite(p.value) ? nlohmann::json(p.value) : nlohmann::json(nullptr)},
          {"errorBound", p.errorBound},
          {"growthExponent", p.growthExponent}};
}

nlohmann::json finiteOrNull(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// Upper bound test used by the precondition gates.
bool densityBelow(const VolumeFraction& f, double bound) { return f.value + 3.0 * f.error <= bound; }

Estimate toEstimate(const VolumeFraction& f) { return {f.value, f.error}; }

void checkLedger(const KernelSpec& kernel, const ConstantLedger& ledger, const char* who) {
  if (kernel.dim() != ledger.d || kernel.s() != ledger.s) {
    throw std::invalid_argument(std::string(who) + ": kernel (d, s) does not match the ledger");
  }
}

std::vector<double> dyadicDown(double top, double bottom) {
  std::vector<double> radii;
  for (double r = top; r >= bottom * (1.0 - 1e-12); r *= 0.5) radii.push_back(r);
  return radii;
}

// Lattice points center + h k inside the closed ball of radius rad, in lexicographic order by row.
struct Grid {
  int dim;
  int n;  // indices run over [-n, n] per axis
  double h;
  Point center;

  long long rows() const {
    long long r = 1;
    for (int i = 1; i < dim; ++i) r *= 2 * n + 1;
    return r;
  }
  // Point of row `row` (all but the first axis) and first-axis index k.
  Point at(long long row, int k) const {
    Point p = center;
    p[0] += h * k;
    for (int i = 1; i < dim; ++i) {
      const long long idx = row % (2 * n + 1);
      row /= 2 * n + 1;
      p[i] += h * static_cast<double>(idx - n);
    }
    return p;
  }
};

struct GridCount {
  long long total = 0;
  long long sparse = 0;
};

SparseSetReport makeSparseReport(int d, double R, double alpha, double h, const std::vector<double>& radii,
                                 const GridCount& c) {
  SparseSetReport out;
  out.alpha = alpha;
  out.R = R;
  out.gridStep = h;
  out.radii = radii;
  out.gridPoints = c.total;
  out.sparsePoints = c.sparse;
  out.measureDalpha = static_cast<double>(c.sparse) * std::pow(h, d);
  out.halfBallMeasure = 0.5 * ballVolume(d, R / 4.0);
  out.gridError = std::sqrt(static_cast<double>(d)) * h * unitSphereArea(d) * std::pow(R / 4.0, d - 1);
  return out;
}

void checkSparseArgs(const RegionSet& set, double R, double alpha, double h, const Point& center) {
  if (!(R > 0.0)) throw std::invalid_argument("sparsePointMeasure: R must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("sparsePointMeasure: alpha must be positive");
  if (!(h > 0.0) || h > R / 64.0) throw std::invalid_argument("sparsePointMeasure: need 0 < gridStep <= R/64");
  if (center.dim() != set.dim()) throw std::invalid_argument("sparsePointMeasure: center dimension mismatch");
}

Point originIfEmpty(const Point& c, int d) { return c.dim() == 0 ? Point(d) : c; }

std::uint64_t pointStream(const Grid& g, long long row, int k) {
  return static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(2 * g.n + 1) +
         static_cast<std::uint64_t>(k + g.n);
}

}  // namespace

std::string checkVerdictName(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass:
      return "Pass";
    case CheckVerdict::Fail:
      return "Fail";
    case CheckVerdict::Inconclusive:
      return "Inconclusive";
    case CheckVerdict::NotApplicable:
      return "NotApplicable";
  }
  return "?";
}

CheckVerdict combineVerdicts(const std::vector<CheckVerdict>& verdicts) {
  CheckVerdict worst = CheckVerdict::Pass;
  for (CheckVerdict v : verdicts) {
    if (v == CheckVerdict::Fail) return v;
    if (v != CheckVerdict::Pass && worst == CheckVerdict::Pass) worst = v;
  }
  return worst;
}

VolumeFraction densityAt(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                         std::uint64_t stream) {
  if (const auto v = set.volumeInBall(center, r)) {
    VolumeFraction out;
    out.value = std::clamp(*v / ballVolume(set.dim(), r), 0.0, 1.0);
    return out;
  }
  return volumeFraction(set, center, r, cfg, stream);
}

bool DensityReport::allPass() const {
  return std::all_of(passes.begin(), passes.end(), [](bool b) { return b; });
}

nlohmann::json DensityReport::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    nlohmann::json row = {{"r", radii[i]},
                          {"fraction", estimateJson(fractions[i])},
                          {"boundaryFraction", estimateJson(boundaryFractions[i])}};
    if (!passes.empty()) row["pass"] = static_cast<bool>(passes[i]);
    rows.push_back(row);
  }
  return {{"center", detail::pointToJson(center)},
          {"target", target ? nlohmann::json(*target) : nlohmann::json(nullptr)},
          {"rows", rows}};
}

DensityReport densityProfile(const RegionSet& set, const Point& center, const std::vector<double>& radii,
                             const QuadConfig& cfg, std::optional<double> target) {
  if (center.dim() != set.dim()) throw std::invalid_argument("densityProfile: center dimension mismatch");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw std::invalid_argument("densityProfile: radii must be positive and strictly increasing");
    }
  }
  DensityReport out;
  out.center = center;
  out.radii = radii;
  out.target = target;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const VolumeFraction f = densityAt(set, center, radii[i], cfg, deriveSeed(kProfileStream, i));
    out.fractions.push_back({f.value, f.error});
    out.boundaryFractions.push_back({f.boundaryFraction, f.boundaryError});
    if (target) out.passes.push_back(f.value >= *target - 3.0 * f.error - 1e-12);
  }
  return out;
}

nlohmann::json SparseSetReport::toJson() const {
  return {{"alpha", alpha},
          {"R", R},
          {"gridStep", gridStep},
          {"measureDalpha", measureDalpha},
          {"halfBallMeasure", halfBallMeasure},
          {"gridError", gridError},
          {"gridPoints", gridPoints},
          {"sparsePoints", sparsePoints},
          {"radii", radii}};
}

SparseSetReport sparsePointMeasure(const RegionSet& set, double R, double alpha, double gridStep,
                                   const QuadConfig& cfg, const Point& centerIn) {
  const int d = set.dim();
  const Point center = originIfEmpty(centerIn, d);
  checkSparseArgs(set, R, alpha, gridStep, center);
  const std::vector<double> radii = dyadicDown(R / 2.0, gridStep);
  const double level = alpha / std::pow(2.0, d);
  const Grid grid{d, static_cast<int>(std::floor(R / 4.0 / gridStep)), gridStep, center};
  const double rad2 = (R / 4.0) * (R / 4.0);

  // Volume fractions inside a task run serially; the grid rows are the parallel tasks.
  QuadConfig inner = cfg;
  inner.exec = Exec::Serial;
  const long long rows = grid.rows();
  std::vector<GridCount> counts(static_cast<std::size_t>(rows));
  forEachTask(static_cast<std::size_t>(rows), cfg.exec, [&](std::size_t row) {
    GridCount c;
    for (int k = -grid.n; k <= grid.n; ++k) {
      const Point x = grid.at(static_cast<long long>(row), k);
      if (norm2(x - center) > rad2) continue;
      ++c.total;
      if (set.membership(x) != Membership::Outside) continue;
      bool sparse = true;
      for (std::size_t j = 0; sparse && j < radii.size(); ++j) {
        // The ball misses E entirely: nothing to measure.
        if (set.meetsBall(x, radii[j]) == std::optional<bool>(false)) break;
        const auto stream = deriveSeed(kGridStream, pointStream(grid, static_cast<long long>(row), k), j);
        sparse = densityAt(set, x, radii[j], inner, stream).value <= level;
      }
      if (sparse) ++c.sparse;
    }
    counts[row] = c;
  });
  GridCount total;
  for (const GridCount& c : counts) {
    total.total += c.total;
    total.sparse += c.sparse;
  }
  return makeSparseReport(d, R, alpha, gridStep, radii, total);
}

SparseSetReport sparsePointMeasureReference(const RegionSet& set, double R, double alpha, double gridStep,
                                            const QuadConfig& cfg, const Point& centerIn) {
  const int d = set.dim();
  const Point center = originIfEmpty(centerIn, d);
  checkSparseArgs(set, R, alpha, gridStep, center);
  const std::vector<double> radii = dyadicDown(R / 2.0, gridStep);
  const double level = alpha / std::pow(2.0, d);
  const Grid grid{d, static_cast<int>(std::floor(R / 4.0 / gridStep)), gridStep, center};
  QuadConfig inner = cfg;
  inner.exec = Exec::Serial;
  GridCount total;
  for (long long row = 0; row < grid.rows(); ++row) {
    for (int k = -grid.n; k <= grid.n; ++k) {
      const Point x = grid.at(row, k);
      if (norm2(x - center) > (R / 4.0) * (R / 4.0)) continue;
      ++total.total;
      bool sparse = set.membership(x) == Membership::Outside;
      for (std::size_t j = 0; j < radii.size(); ++j) {
        const auto stream = deriveSeed(kGridStream, pointStream(grid, static_cast<long long>(row), k), j);
        const bool ok = densityAt(set, x, radii[j], inner, stream).value <= level;
        sparse = sparse && ok;
      }
      if (sparse) ++total.sparse;
    }
  }
  return makeSparseReport(d, R, alpha, gridStep, radii, total);
}

nlohmann::json RearrangementResult::toJson() const {
  return {{"lhs", finiteOrNull(lhs)}, {"lhsError", lhsError}, {"rhs", finiteOrNull(rhs)}, {"rhsError", rhsError},
          {"rho", rho},           {"rhoError", rhoError}, {"verdict", checkVerdictName(verdict)}};
}

RearrangementResult rearrangementCheck(const BallRegion& omega, const RegionSet& set, const Point& x, double s,
                                       const QuadConfig& cfg) {
  cfg.validate();
  const int d = set.dim();
  if (omega.center.dim() != d || x.dim() != d) throw std::invalid_argument("rearrangementCheck: dimension mismatch");
  if (!(omega.radius > 0.0)) throw std::invalid_argument("rearrangementCheck: Omega needs a positive radius");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("rearrangementCheck: s must lie in (0, 1)");
  const double sep = distance(x, omega.center);
  if (sep > omega.radius * (1.0 + 1e-12)) {
    throw std::invalid_argument("rearrangementCheck: x lies outside the closure of Omega");
  }
  const double omegaVol = ballVolume(d, omega.radius);
  const VolumeFraction f = densityAt(set, omega.center, omega.radius, cfg, kRearrangeStream);
  const double V = f.value * omegaVol;
  const double dV = f.error * omegaVol;
  if (V > omegaVol * (1.0 + 1e-12)) {
    throw std::invalid_argument("rearrangementCheck: |Omega ∩ E| exceeds |Omega|");
  }

  const double far = sep + omega.radius;
  auto solveRho = [&](double target) {
    target = std::clamp(target, 0.0, omegaVol);
    if (target <= 0.0) return 0.0;
    double lo = 0.0, hi = far;
    if (lensVolume(d, omega.radius, hi, sep) < target * (1.0 - 1e-12)) {
      throw std::runtime_error("rearrangementCheck: volume of Omega ∩ B_rho(x) does not reach |Omega ∩ E|");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * far; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lensVolume(d, omega.radius, mid, sep) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  RearrangementResult out;
  out.rho = solveRho(V);
  if (out.rho == 0.0 && dV == 0.0) {
    // Both sides are the full kernel mass of Omega at x, which diverges.
    out.lhs = out.rhs = kInf;
    out.verdict = CheckVerdict::Pass;
    return out;
  }
  const double rhoLo = solveRho(V - dV), rhoHi = solveRho(V + dV);
  out.rhoError = 0.5 * (rhoHi - rhoLo);

  // Omega segment along x + t u, t in (0, far].
  auto omegaSegment = [&](const Point& u, double& a, double& b) {
    double t1 = 0.0, t2 = 0.0;
    if (!detail::sphereRoots(x, u, omega.center, omega.radius, t1, t2)) return false;
    a = std::max(t1, 0.0);
    b = std::min(t2, far);
    return b > a;
  };
  auto mass = [&](double a, double b) { return (std::pow(a, -s) - std::pow(b, -s)) / s; };
  std::atomic<bool> singular{false};
  const RayIntegrand lhsRay = [&](const Point& u, double, double) {
    double a = 0.0, b = 0.0;
    if (!omegaSegment(u, a, b)) return 0.0;
    const Chord c = set.chord(x, u, 0.0, far);
    double acc = 0.0, from = 0.0;
    bool in = c.startsInside;
    auto addOutside = [&](double lo, double hi) {
      lo = std::max(lo, a);
      hi = std::min(hi, b);
      if (hi <= lo) return;
      if (lo <= 0.0) {
        singular = true;
        return;
      }
      acc += mass(lo, hi);
    };
    for (double t : c.crossings) {
      if (!in) addOutside(from, t);
      in = !in;
      from = t;
    }
    if (!in) addOutside(from, far);
    return acc;
  };
  auto rhsRay = [&](double rho) {
    return RayIntegrand([&, rho](const Point& u, double, double) {
      double a = 0.0, b = 0.0;
      if (!omegaSegment(u, a, b)) return 0.0;
      a = std::max(a, rho);
      return b > a ? mass(a, b) : 0.0;
    });
  };
  const ShellOptions opts{s, kRearrangeStream, 0, Point(), 0.0};
  const ShellIntegral lhs = rayShellIntegrate(lhsRay, d, 0.0, far, cfg, opts);
  if (singular) {
    out.lhs = kInf;
    out.rhs = rayShellIntegrate(rhsRay(out.rho), d, 0.0, far, cfg, opts).value;
    out.verdict = CheckVerdict::Pass;
    return out;
  }
  const ShellIntegral rhs = rayShellIntegrate(rhsRay(out.rho), d, 0.0, far, cfg, opts);
  // Same directions for both sides, so the paired difference carries the smaller error.
  const RayIntegrand diffRay = [&, rhoRay = rhsRay(out.rho)](const Point& u, double a, double b) {
    return lhsRay(u, a, b) - rhoRay(u, a, b);
  };
  const ShellIntegral diff = rayShellIntegrate(diffRay, d, 0.0, far, cfg, opts);
  double rhoSpread = 0.0;
  if (out.rhoError > 0.0) {
    const double up = rayShellIntegrate(rhsRay(rhoLo), d, 0.0, far, cfg, opts).value;
    const double down = rayShellIntegrate(rhsRay(rhoHi), d, 0.0, far, cfg, opts).value;
    rhoSpread = 0.5 * std::abs(up - down);
  }
  out.lhs = lhs.value;
  out.lhsError = lhs.statError;
  out.rhs = rhs.value;
  out.rhsError = std::hypot(rhs.statError, rhoSpread);
  const double slack = 3.0 * std::hypot(diff.statError, rhoSpread) + 1e-12 * (std::abs(lhs.value) + std::abs(rhs.value));
  out.verdict = diff.value >= -slack ? CheckVerdict::Pass : CheckVerdict::Fail;
  return out;
}

nlohmann::json ThresholdResult::toJson() const {
  return {{"verdict", checkVerdictName(verdict)}, {"density", estimateJson(density)},
          {"densityBound", densityBound},         {"threshold", threshold},
          {"curvature", pvJson(curvature)},        {"reason", reason}};
}

ThresholdResult sparseCurvatureThreshold(const RegionSet& set, const KernelSpec& kernel, const TouchingBall& ball,
                                         const ConstantLedger& ledger, const QuadConfig& cfg) {
  checkLedger(kernel, ledger, "sparseCurvatureThreshold");
  if (!(ball.radius > 0.0)) throw std::invalid_argument("sparseCurvatureThreshold: ball radius must be positive");
  const double r = ball.radius;
  ThresholdResult out;
  out.densityBound = ledger.beta;
  out.threshold = (ledger.M + 1.0) * std::pow(r, -kernel.s());
  const VolumeFraction f = densityAt(set, ball.center, 2.0 * r, cfg, kPreconditionStream);
  out.density = toEstimate(f);
  if (!densityBelow(f, ledger.beta)) {
    out.reason = "density in B_2r above beta";
    return out;
  }
  out.curvature = curvatureViaTouchingBall(set, kernel, ball, cfg);
  switch (out.curvature.verdict) {
    case Verdict::DivergedPlus:
      out.verdict = CheckVerdict::Pass;
      break;
    case Verdict::DivergedMinus:
      out.verdict = CheckVerdict::Fail;
      break;
    case Verdict::Inconclusive:
      out.verdict = CheckVerdict::Inconclusive;
      break;
    case Verdict::Converged:
      out.verdict = out.curvature.value >= out.threshold - out.curvature.errorBound ? CheckVerdict::Pass
                                                                                    : CheckVerdict::Fail;
      break;
  }
  return out;
}

nlohmann::json ShellCheckResult::toJson() const {
  return {{"verdict", checkVerdictName(verdict)}, {"density", estimateJson(density)},
          {"densityBound", densityBound},         {"bound", bound},
          {"integral", truncatedJson(integral)},   {"reason", reason}};
}

ShellCheckResult shellLowerBoundCheck(const RegionSet& set, const KernelSpec& kernel, const Point& x, double r,
                                      const ConstantLedger& ledger, const QuadConfig& cfg) {
  checkLedger(kernel, ledger, "shellLowerBoundCheck");
  if (!(r > 0.0)) throw std::invalid_argument("shellLowerBoundCheck: r must be positive");
  ShellCheckResult out;
  out.densityBound = ledger.gamma;
  out.bound = ledger.Cshell * std::pow(r, -kernel.s());
  const VolumeFraction f = densityAt(set, x, r, cfg, kPreconditionStream);
  out.density = toEstimate(f);
  if (!densityBelow(f, ledger.gamma)) {
    out.reason = "density in B_r above gamma";
    return out;
  }
  out.integral = annulusChiIntegral(set, kernel, x, 0.5 * r, r, cfg);
  out.verdict = out.integral.value >= out.bound - out.integral.errorBound ? CheckVerdict::Pass : CheckVerdict::Fail;
  return out;
}

nlohmann::json BlowupFit::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows.push_back({{"r", radii[i]},
                    {"density", estimateJson(densities[i])},
                    {"value", truncatedJson(values[i])},
                    {"envelope", envelope[i]}});
  }
  return {{"verdict", checkVerdictName(verdict)},
          {"slope", finiteOrNull(slope)},
          {"slopeWithin10", slopeWithin10},
          {"firstFailingScale", firstFailingScale ? nlohmann::json(*firstFailingScale) : nlohmann::json(nullptr)},
          {"reason", reason},
          {"rows", rows}};
}

BlowupFit blowupScan(const RegionSet& set, const KernelSpec& kernel, const Point& x, double r0, double rMin,
                     const ConstantLedger& ledger, const QuadConfig& cfg) {
  checkLedger(kernel, ledger, "blowupScan");
  if (!(r0 > 0.0) || !(rMin > 0.0)) throw std::invalid_argument("blowupScan: radii must be positive");
  const std::vector<double> radii = dyadicDown(r0, rMin);
  if (radii.size() < 3) throw std::invalid_argument("blowupScan: need at least 3 dyadic radii in [rMin, r0]");
  const double s = kernel.s();
  BlowupFit out;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const VolumeFraction f = densityAt(set, x, radii[j], cfg, deriveSeed(kPreconditionStream, j));
    out.densities.push_back(toEstimate(f));
    if (!densityBelow(f, ledger.gamma)) {
      out.firstFailingScale = radii[j];
      out.reason = "density above gamma at r = " + std::to_string(radii[j]);
      return out;
    }
  }
  out.radii = radii;
  const double offset = -std::pow(2.0, s) * ledger.Lambda * unitSphereArea(ledger.d) / (s * std::pow(r0, s));
  bool aboveEnvelope = true;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool positive = true;
  for (double r : radii) {
    const TruncatedIntegral v = curvatureLowerBoundTruncated(set, kernel, x, r, cfg);
    const double env = offset + std::pow(2.0, -s) * ledger.Cshell * std::pow(r, -s);
    out.values.push_back(v);
    out.envelope.push_back(env);
    aboveEnvelope = aboveEnvelope && v.value >= env - v.errorBound;
    if (v.value <= 0.0) {
      positive = false;
      continue;
    }
    const double lx = std::log(r), ly = std::log(v.value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(radii.size());
  out.slope = positive ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
  out.slopeWithin10 = positive && std::abs(out.slope + s) <= 0.1 * s;
  const bool steep = positive && out.slope <= -s * (1.0 - 0.1);
  out.verdict = steep && aboveEnvelope ? CheckVerdict::Pass : CheckVerdict::Fail;
  if (!steep) out.reason = "slope above -0.9 s";
  if (!aboveEnvelope) out.reason = "value below the shell envelope";
  return out;
}

nlohmann::json ViscosityReport::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const ViscosityEntry& e : entries) {
    nlohmann::json row = {{"point", detail::pointToJson(e.point)}, {"constrained", e.constrained}};
    if (e.constrained) {
      row["ballRadius"] = e.ballRadius;
      row["curvature"] = pvJson(e.curvature);
      row["violation"] = e.violation;
    }
    rows.push_back(row);
  }
  return {{"bound", bound},           {"sampled", sampled},         {"unconstrained", unconstrained},
          {"evaluated", evaluated},   {"inconclusive", inconclusive}, {"violations", violations},
          {"maxValue", maxValue},     {"points", rows}};
}

ViscosityReport viscositySubsolutionScan(const RegionSet& set, const KernelSpec& kernel, const BallRegion& omega,
                                         double bound, int nPoints, const QuadConfig& cfg,
                                         const ViscosityOptions& options) {
  if (nPoints < 1) throw std::invalid_argument("viscositySubsolutionScan: nPoints must be >= 1");
  const double maxBall = options.maxBallRadius > 0.0 ? options.maxBallRadius : 0.5 * omega.radius;
  ViscosityReport out;
  out.bound = bound;
  out.maxValue = -kInf;
  Rng rng(deriveSeed(options.seed, kScanStream));
  for (int attempt = 0; attempt < 4 * nPoints && out.sampled < nPoints; ++attempt) {
    const auto x = set.sampleBoundary(rng, omega);
    if (!x) continue;
    ViscosityEntry e;
    e.point = *x;
    ++out.sampled;
    ExteriorBallOptions eb;
    eb.seed = deriveSeed(options.seed, kScanStream, static_cast<std::uint64_t>(attempt));
    const ExteriorBallResult found = findExteriorBall(set, *x, maxBall, eb);
    if (!found.ball) {
      ++out.unconstrained;
      out.entries.push_back(e);
      continue;
    }
    e.constrained = true;
    e.ballRadius = found.ball->radius;
    QuadConfig c = cfg;
    c.seed = deriveSeed(cfg.seed, kScanStream, static_cast<std::uint64_t>(attempt));
    e.curvature = curvatureViaTouchingBall(set, kernel, *found.ball, c);
    ++out.evaluated;
    switch (e.curvature.verdict) {
      case Verdict::DivergedPlus:
        e.violation = true;
        out.maxValue = kInf;
        break;
      case Verdict::Converged:
        out.maxValue = std::max(out.maxValue, e.curvature.value);
        e.violation = e.curvature.value > bound + e.curvature.errorBound;
        break;
      case Verdict::DivergedMinus:
        break;
      case Verdict::Inconclusive:
        ++out.inconclusive;
        break;
    }
    if (e.violation) ++out.violations;
    out.entries.push_back(e);
  }
  if (!std::isfinite(out.maxValue) && out.maxValue < 0.0) out.maxValue = std::numeric_limits<double>::quiet_NaN();
  return out;
}

nlohmann::json SBReport::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const SBEntry& e : entries) {
    rows.push_back({{"r", e.r},
                    {"identityLhs", estimateJson(e.identityLhs)},
                    {"identityRhs", e.identityRhs},
                    {"identityRhsError", e.identityRhsError},
                    {"identityHolds", e.identityHolds},
                    {"perimeter", estimateJson(e.perimeter)},
                    {"perimeterRadius", e.perimeterRadius},
                    {"ballPerimeter", e.ballPerimeter},
                    {"inequalityHolds", e.inequalityHolds}});
  }
  return {{"alpha", alpha}, {"delta", delta}, {"verdict", checkVerdictName(verdict)}, {"rows", rows}};
}

IdentityCheck averagingIdentity(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                                std::uint64_t stream) {
  if (!(r > 0.0)) throw std::invalid_argument("averagingIdentity: r must be positive");
  const double vol = ballVolume(set.dim(), r);
  const VolumeFraction f = densityAt(set, center, r, cfg, deriveSeed(kIdentityStream, stream));
  const double avg = f.value;
  IdentityCheck out;
  out.rhs = 2.0 * vol * avg * (1.0 - avg);
  out.rhsError = 2.0 * vol * std::abs(1.0 - 2.0 * avg) * f.error;
  const int n = cfg.volumeSamples;
  Rng rng(deriveSeed(cfg.seed, kIdentityStream, stream, 1));
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double chi = set.membership(uniformInBall(rng, center, r)) == Membership::Inside ? 1.0 : 0.0;
    const double v = std::abs(chi - avg);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  out.lhs = {mean * vol, std::sqrt(var / n) * vol};
  out.holds = std::abs(out.lhs.value - out.rhs) <= 3.0 * std::hypot(out.lhs.error, out.rhsError) + 1e-12 * vol;
  return out;
}

SBReport fractionalSBCheck(const RegionSet& set, const std::vector<double>& radii, double alpha, double delta,
                           const QuadConfig& cfg) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("fractionalSBCheck: alpha must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("fractionalSBCheck: delta must lie in (0, 1)");
  const int d = set.dim();
  const Point origin(d);
  SBReport out;
  out.alpha = alpha;
  out.delta = delta;
  bool ok = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r > 0.0)) throw std::invalid_argument("fractionalSBCheck: radii must be positive");
    SBEntry e;
    e.r = r;

    const IdentityCheck id = averagingIdentity(set, origin, r, cfg, i);
    e.identityLhs = id.lhs;
    e.identityRhs = id.rhs;
    e.identityRhsError = id.rhsError;
    e.identityHolds = id.holds;

    const BallRegion omega{origin, r};
    double slack = 0.0;
    if (alpha < 1.0) {
      // Per_α(E; ·) grows with the domain and drops pairs beyond the window, so a
      // smaller concentric ball gives a lower bound. Lines are kept to about
      // kMaxPiecesPerLine boundary pieces.
      double sub = r;
      const double fs = set.featureScale();
      if (std::isfinite(fs) && 10.0 * sub / fs > kMaxPiecesPerLine) sub = kMaxPiecesPerLine * fs / 10.0;
      QuadConfig window = cfg;
      window.outerRadius = std::min(cfg.outerRadius, 4.0 * sub);
      window.eps0 = std::min(cfg.eps0, 0.5 * window.outerRadius);
      const PerimeterEstimate p = perimeterK(set, BallRegion{origin, sub}, fractionalKernel(d, alpha), window);
      e.perimeterRadius = sub;
      e.perimeter = {p.value, p.statError};
      if (sub == r) slack = p.tail;
      e.ballPerimeter = unitSphereArea(d) * ballCurvatureExact(d, alpha) * std::pow(r, d - alpha) / (d - alpha);
    } else {
      const double h = std::min(set.featureScale(), r) / 16.0;
      const MinkowskiEstimate m = classicalPerimeterMinkowski(set, omega, h, cfg);
      e.perimeterRadius = r;
      e.perimeter = {m.value, m.statError};
      e.ballPerimeter = unitSphereArea(d) * std::pow(r, d - 1);
    }
    e.inequalityHolds = e.perimeter.value + 3.0 * e.perimeter.error + slack >= delta * e.ballPerimeter;
    ok = ok && e.identityHolds && e.inequalityHolds;
    out.entries.push_back(e);
  }
  out.verdict = ok ? CheckVerdict::Pass : CheckVerdict::Fail;
  return out;
}

}  // namespace nlgeom
