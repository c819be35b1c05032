#include "nlgeom/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nlgeom/curvature.hpp"
#include "nlgeom/measure.hpp"

namespace nlgeom {

namespace {

constexpr double kQuota = 0.9;  // share of points that must pass in statistical suites

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

int dimOf(const SuiteParams& p) {
  if (p.scene) return p.scene->dim();
  if (p.kernel) return p.kernel->dim();
  return p.dim;
}

KernelSpec kernelOf(const SuiteParams& p, int d) {
  if (p.kernel) {
    if (p.kernel->dim() != d) throw std::invalid_argument("suite: kernel and scene dimensions differ");
    return *p.kernel;
  }
  return fractionalKernel(d, p.s);
}

ConstantLedger ledgerOf(const SuiteParams& p, const KernelSpec& k) {
  return buildLedger(k.dim(), k.s(), k.lambda(), k.Lambda(), p.M);
}

QuadConfig seeded(const SuiteParams& p, std::uint64_t a, std::uint64_t b = 0) {
  QuadConfig c = p.cfg;
  c.seed = deriveSeed(p.seed, a, b);
  return c;
}

double dustScale(int d) { return d == 1 ? 1.0 / 1024.0 : d == 2 ? 1.0 / 256.0 : 1.0 / 32.0; }

RegionSet dustFor(const SuiteParams& p, int d, double target) {
  SparseDustParams dp;
  dp.dim = d;
  dp.target = target;
  dp.scale = dustScale(d);
  dp.seed = p.seed;
  return sparseDust(dp);
}

std::vector<Point> dustPoints(const RegionSet& dust, int count, std::uint64_t seed) {
  std::vector<Point> pts{dust.anchor()};
  Rng rng(deriveSeed(seed, 0xb0a7));
  const BallRegion window{dust.anchor(), 0.5};
  for (int tries = 0; static_cast<int>(pts.size()) < count && tries < 64 * count; ++tries) {
    if (auto x = dust.sampleBoundary(rng, window)) pts.push_back(*x);
  }
  return pts;
}

// Statistical suites: any failure fails; otherwise the pass share decides.
void finishStatistical(SuiteReport& rep) {
  if (rep.failed > 0) {
    rep.verdict = CheckVerdict::Fail;
  } else if (rep.total > 0 && rep.passed >= kQuota * rep.total) {
    rep.verdict = CheckVerdict::Pass;
  } else if (rep.notApplicable == rep.total) {
    rep.verdict = CheckVerdict::NotApplicable;
  } else {
    rep.verdict = CheckVerdict::Inconclusive;
  }
  rep.lines.push_back(rep.suite + ": " + std::to_string(rep.passed) + "/" + std::to_string(rep.total) +
                      " pass, " + std::to_string(rep.failed) + " fail, " + std::to_string(rep.inconclusive) +
                      " inconclusive, " + std::to_string(rep.notApplicable) + " not applicable");
}

// Exact suites: every instance must pass.
void finishExact(SuiteReport& rep) {
  if (rep.failed > 0) {
    rep.verdict = CheckVerdict::Fail;
  } else if (rep.passed == rep.total && rep.total > 0) {
    rep.verdict = CheckVerdict::Pass;
  } else if (rep.notApplicable > 0 && rep.inconclusive == 0) {
    rep.verdict = CheckVerdict::NotApplicable;
  } else {
    rep.verdict = CheckVerdict::Inconclusive;
  }
  rep.lines.push_back(rep.suite + ": " + std::to_string(rep.passed) + "/" + std::to_string(rep.total) + " pass");
}

SuiteReport lemma31(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "lemma31";
  const int d = dimOf(p);
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const double R = p.radii.empty() ? 4.0 : p.radii.front();
  const double h = R / 512.0;  // 256 grid steps across B_{R/4}
  const double alpha = L.alphaThm12;
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < p.trials; ++t) {
    Rng rng(deriveSeed(p.seed, 31, t));
    const RegionSet e = randomGrainSet(rng, d, R, L.theta * alpha * rng.uniform(0.25, 1.0));
    const double vol = e.volumeInBall(Point(d), R).value_or(0.0);
    CheckVerdict v = CheckVerdict::NotApplicable;
    SparseSetReport sr;
    if (vol <= L.theta * alpha * ballVolume(d, R)) {
      sr = sparsePointMeasure(e, R, alpha, h, seeded(p, 31, t));
      v = sr.measureDalpha >= sr.halfBallMeasure - sr.gridError ? CheckVerdict::Pass : CheckVerdict::Fail;
    }
    rep.tally(v);
    nlohmann::json row = sr.toJson();
    row["trial"] = t;
    row["verdict"] = checkVerdictName(v);
    rows.push_back(row);
    rep.lines.push_back("trial " + std::to_string(t) + ": |D_alpha| = " + fmt(sr.measureDalpha) + " vs " +
                        fmt(sr.halfBallMeasure) + " - " + fmt(sr.gridError) + " " + checkVerdictName(v));
  }
  rep.details = {{"alpha", alpha}, {"theta", L.theta}, {"R", R}, {"gridStep", h}, {"trials", rows}};
  finishExact(rep);
  return rep;
}

SuiteReport lemma32(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "lemma32";
  const int d = dimOf(p);
  const double s = p.kernel ? p.kernel->s() : p.s;
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < p.trials; ++t) {
    Rng rng(deriveSeed(p.seed, 32, t));
    const RearrangementInstance inst = randomRearrangementInstance(rng, d);
    const RearrangementResult r = rearrangementCheck(inst.omega, inst.set, inst.x, s, seeded(p, 32, t));
    rep.tally(r.verdict);
    nlohmann::json row = r.toJson();
    row["trial"] = t;
    rows.push_back(row);
  }
  rep.details = {{"s", s}, {"trials", rows}};
  finishExact(rep);
  return rep;
}

SuiteReport lemma33(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "lemma33";
  const int d = dimOf(p);
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const RegionSet dust = dustFor(p, d, L.beta / 2.0);
  const double r = dustScale(d);
  nlohmann::json rows = nlohmann::json::array();
  int i = 0;
  for (const Point& x : dustPoints(dust, p.points, p.seed)) {
    ExteriorBallOptions eb;
    eb.seed = deriveSeed(p.seed, 33, i);
    const ExteriorBallResult found = findExteriorBall(dust, x, r, eb);
    nlohmann::json row = {{"point", i}};
    CheckVerdict v = CheckVerdict::NotApplicable;
    if (found.ball) {
      const ThresholdResult res = sparseCurvatureThreshold(dust, k, *found.ball, L, seeded(p, 33, i));
      v = res.verdict;
      row["result"] = res.toJson();
      row["ballRadius"] = found.ball->radius;
    } else {
      row["reason"] = found.reason;
    }
    rep.tally(v);
    rows.push_back(row);
    ++i;
  }
  rep.details = {{"beta", L.beta}, {"dustTarget", L.beta / 2.0}, {"points", rows}};
  finishStatistical(rep);
  return rep;
}

SuiteReport lemma41(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "lemma41";
  const int d = dimOf(p);
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const RegionSet dust = dustFor(p, d, L.gamma / 2.0);
  nlohmann::json rows = nlohmann::json::array();
  int i = 0;
  for (const Point& x : dustPoints(dust, p.points, p.seed)) {
    std::vector<CheckVerdict> vs;
    nlohmann::json scales = nlohmann::json::array();
    for (double r = 0.5; r >= dustScale(d) * (1.0 - 1e-12); r *= 0.5) {
      const ShellCheckResult res = shellLowerBoundCheck(dust, k, x, r, L, seeded(p, 41, i));
      vs.push_back(res.verdict);
      nlohmann::json row = res.toJson();
      row["r"] = r;
      scales.push_back(row);
    }
    rep.tally(combineVerdicts(vs));
    rows.push_back({{"point", i}, {"scales", scales}});
    ++i;
  }
  rep.details = {{"gamma", L.gamma}, {"Cshell", L.Cshell}, {"points", rows}};
  finishStatistical(rep);
  return rep;
}

SuiteReport lemma42(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "lemma42";
  const int d = dimOf(p);
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const RegionSet dust = dustFor(p, d, L.gamma / 2.0);
  nlohmann::json rows = nlohmann::json::array();
  double worst = 0.0;
  int i = 0;
  for (const Point& x : dustPoints(dust, p.points, p.seed)) {
    const BlowupFit fit = blowupScan(dust, k, x, 0.5, dustScale(d), L, seeded(p, 42, i));
    CheckVerdict v = fit.verdict;
    if (v == CheckVerdict::Pass && !fit.slopeWithin10) v = CheckVerdict::Fail;
    if (std::isfinite(fit.slope)) worst = std::max(worst, std::abs(fit.slope + k.s()) / k.s());
    rep.tally(v);
    nlohmann::json row = fit.toJson();
    row["point"] = i;
    rows.push_back(row);
    ++i;
  }
  rep.lines.push_back("largest relative slope deviation from -s: " + fmt(worst));
  rep.details = {{"gamma", L.gamma}, {"worstSlopeDeviation", worst}, {"points", rows}};
  finishStatistical(rep);
  return rep;
}

SuiteReport thm12(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "thm12";
  const RegionSet e = p.scene ? *p.scene : periodicSlab(p.dim, 0.1);
  const int d = e.dim();
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const std::vector<double> radii = p.radii.empty() ? std::vector<double>{1.0} : p.radii;
  const Point origin(d);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double R = radii[i];
    nlohmann::json row = {{"R", R}};
    CheckVerdict v = CheckVerdict::NotApplicable;
    if (!e.onBoundary(origin)) {
      row["reason"] = "origin is not a boundary point";
    } else {
      const double bound = L.M * std::pow(R, -k.s());
      ViscosityOptions vo;
      vo.seed = deriveSeed(p.seed, 12, i);
      const ViscosityReport scan =
          viscositySubsolutionScan(e, k, BallRegion{origin, R / 2.0}, bound, std::min(p.points, 8), seeded(p, 12, i), vo);
      row["scan"] = scan.toJson();
      if (scan.violations > 0) {
        row["reason"] = "not a subsolution of curv <= M R^-s in B_R/2";
      } else if (scan.inconclusive > 0 || scan.evaluated == 0) {
        v = CheckVerdict::Inconclusive;
        row["reason"] = "subsolution scan inconclusive";
      } else {
        const DensityReport dr = densityProfile(e, origin, {R}, seeded(p, 12, i), L.delta12);
        row["density"] = dr.toJson();
        const bool boundaryNull = dr.boundaryFractions[0].value <= 3.0 * dr.boundaryFractions[0].error;
        v = dr.allPass() && boundaryNull ? CheckVerdict::Pass : CheckVerdict::Fail;
        const double margin = dr.fractions[0].value / L.delta12;
        row["margin"] = margin;
        rep.lines.push_back("R = " + fmt(R) + ": |E ∩ B_R|/|B_R| = " + fmt(dr.fractions[0].value) +
                            " vs delta = " + fmt(L.delta12) + " (margin x" + fmt(margin) + ")");
      }
    }
    if (v != CheckVerdict::Pass && row.contains("reason")) {
      rep.lines.push_back("R = " + fmt(R) + ": " + row["reason"].get<std::string>());
    }
    row["verdict"] = checkVerdictName(v);
    rep.tally(v);
    rows.push_back(row);
  }
  rep.details = {{"set", sceneToJson(e)}, {"delta12", L.delta12}, {"radii", rows}};
  finishExact(rep);
  return rep;
}

SuiteReport thm16(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "thm16";
  const int d = dimOf(p);
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const RegionSet dust = dustFor(p, d, L.delta16);
  ViscosityOptions vo;
  vo.seed = deriveSeed(p.seed, 16);
  const ViscosityReport scan =
      viscositySubsolutionScan(dust, k, BallRegion{dust.anchor(), 0.5}, L.M, 2, seeded(p, 16), vo);
  nlohmann::json rows = nlohmann::json::array();
  int i = 0;
  for (const Point& x : dustPoints(dust, p.points, p.seed)) {
    const BlowupFit fit = blowupScan(dust, k, x, 0.5, dustScale(d), L, seeded(p, 16, i + 1));
    rep.tally(fit.verdict);
    nlohmann::json row = fit.toJson();
    row["point"] = i;
    rows.push_back(row);
    ++i;
  }
  rep.lines.push_back("viscosity scan of the dust: " + std::to_string(scan.violations) + " of " +
                      std::to_string(scan.evaluated) + " touching points above M (reported only)");
  rep.details = {{"delta16", L.delta16}, {"scan", scan.toJson()}, {"points", rows}};
  finishStatistical(rep);
  return rep;
}

SuiteReport cor15(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "cor15";
  const RegionSet e = p.scene ? *p.scene : periodicSlab(p.dim, 0.1);
  const int d = e.dim();
  const KernelSpec k = kernelOf(p, d);
  const ConstantLedger L = ledgerOf(p, k);
  const std::vector<double> radii = p.radii.empty() ? std::vector<double>{0.1, 1.0, 10.0, 100.0} : p.radii;
  nlohmann::json rows = nlohmann::json::array();
  for (double alpha : {0.5, 1.0}) {
    const SBReport sb = fractionalSBCheck(e, radii, alpha, L.delta12, seeded(p, 15));
    for (const SBEntry& en : sb.entries) {
      rep.tally(en.identityHolds && en.inequalityHolds ? CheckVerdict::Pass : CheckVerdict::Fail);
      rep.lines.push_back("alpha = " + fmt(alpha) + ", r = " + fmt(en.r) + ": Per = " + fmt(en.perimeter.value) +
                          " vs delta Per(B_r) = " + fmt(L.delta12 * en.ballPerimeter) +
                          (en.identityHolds ? ", identity ok" : ", identity off"));
    }
    rows.push_back(sb.toJson());
  }
  // Identity on random canonical sets and radii.
  int identityPass = 0;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng(deriveSeed(p.seed, 15, t, 1));
    const ContactInstance inst = randomContactInstance(rng, d);
    const double r = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
    const IdentityCheck id = averagingIdentity(inst.set, inst.contact, r, seeded(p, 15, t + 1), t);
    rep.tally(id.holds ? CheckVerdict::Pass : CheckVerdict::Fail);
    identityPass += id.holds ? 1 : 0;
  }
  rep.lines.push_back("averaging identity: " + std::to_string(identityPass) + "/" + std::to_string(p.trials));
  rep.details = {{"set", sceneToJson(e)}, {"delta", L.delta12}, {"checks", rows}};
  finishExact(rep);
  return rep;
}

SuiteReport envelope22(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "envelope22";
  const int d = p.kernel ? p.kernel->dim() : 2;
  const KernelSpec k = p.kernel ? *p.kernel : anisotropicKernel(2, p.s, {1.5, 0.0, 0.5});
  const double H = ballCurvatureExact(d, k.s());
  const std::vector<double> radii = p.radii.empty() ? std::vector<double>{0.5, 1.0, 2.0} : p.radii;
  nlohmann::json rows = nlohmann::json::array();
  for (double r : radii) {
    const RegionSet b = ball(Point(d), r);
    Rng rng(deriveSeed(p.seed, 22));
    for (int i = 0; i < p.points; ++i) {
      const Point x = r * randomDirection(rng, d);
      const PvEstimate pv = curvaturePV(b, k, x, seeded(p, 22, i));
      const double lo = k.lambda() * std::pow(r, -k.s()) * H, hi = k.Lambda() * std::pow(r, -k.s()) * H;
      CheckVerdict v = CheckVerdict::Inconclusive;
      if (pv.verdict == Verdict::Converged) {
        v = pv.value >= lo - pv.errorBound && pv.value <= hi + pv.errorBound ? CheckVerdict::Pass : CheckVerdict::Fail;
      }
      rep.tally(v);
      rows.push_back({{"r", r}, {"value", pv.value}, {"errorBound", pv.errorBound}, {"lo", lo}, {"hi", hi},
                      {"verdict", checkVerdictName(v)}});
    }
  }
  rep.details = {{"kernel", k.toJson()}, {"points", rows}};
  finishExact(rep);
  return rep;
}

SuiteReport formula24(const SuiteParams& p) {
  SuiteReport rep;
  rep.suite = "formula24";
  const int d = dimOf(p);
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < p.trials; ++t) {
    Rng rng(deriveSeed(p.seed, 24, t));
    const ContactInstance inst = randomContactInstance(rng, d);
    const KernelSpec k = kernelOf(p, d);
    ExteriorBallOptions eb;
    eb.seed = deriveSeed(p.seed, 24, t, 1);
    const ExteriorBallResult found = findExteriorBall(inst.set, inst.contact, 1.0, eb);
    nlohmann::json row = {{"trial", t}, {"set", sceneToJson(inst.set)}};
    CheckVerdict v = CheckVerdict::NotApplicable;
    if (found.ball) {
      const PvEstimate pv = curvaturePV(inst.set, k, inst.contact, seeded(p, 24, t));
      const PvEstimate tb = curvatureViaTouchingBall(inst.set, k, *found.ball, seeded(p, 24, t + p.trials));
      if (pv.verdict == Verdict::Converged && tb.verdict == Verdict::Converged) {
        const double gap = std::abs(pv.value - tb.value);
        v = gap <= pv.errorBound + tb.errorBound ? CheckVerdict::Pass : CheckVerdict::Fail;
        row["pv"] = pv.value;
        row["touchingBall"] = tb.value;
        row["gap"] = gap;
        row["combinedErrorBound"] = pv.errorBound + tb.errorBound;
      } else {
        v = CheckVerdict::Inconclusive;
        row["pvVerdict"] = verdictName(pv.verdict);
        row["touchingBallVerdict"] = verdictName(tb.verdict);
      }
    } else {
      row["reason"] = found.reason;
    }
    row["verdict"] = checkVerdictName(v);
    rep.tally(v);
    rows.push_back(row);
  }
  rep.details = {{"pairs", rows}};
  finishExact(rep);
  return rep;
}

}  // namespace

const std::vector<std::string>& suiteNames() {
  static const std::vector<std::string> names{"lemma31", "lemma32", "lemma33",    "lemma41",  "lemma42",
                                              "thm12",   "thm16",   "cor15",      "envelope22", "formula24"};
  return names;
}

void SuiteReport::tally(CheckVerdict v) {
  ++total;
  switch (v) {
    case CheckVerdict::Pass:
      ++passed;
      break;
    case CheckVerdict::Fail:
      ++failed;
      break;
    case CheckVerdict::Inconclusive:
      ++inconclusive;
      break;
    case CheckVerdict::NotApplicable:
      ++notApplicable;
      break;
  }
}

nlohmann::json SuiteReport::toJson() const {
  return {{"suite", suite},
          {"verdict", checkVerdictName(verdict)},
          {"total", total},
          {"passed", passed},
          {"failed", failed},
          {"inconclusive", inconclusive},
          {"notApplicable", notApplicable},
          {"summary", lines},
          {"details", details}};
}

SuiteReport runSuite(const std::string& name, const SuiteParams& params) {
  params.cfg.validate();
  if (params.trials < 1 || params.points < 1) throw std::invalid_argument("suite: trials and points must be >= 1");
  if (name == "lemma31") return lemma31(params);
  if (name == "lemma32") return lemma32(params);
  if (name == "lemma33") return lemma33(params);
  if (name == "lemma41") return lemma41(params);
  if (name == "lemma42") return lemma42(params);
  if (name == "thm12") return thm12(params);
  if (name == "thm16") return thm16(params);
  if (name == "cor15") return cor15(params);
  if (name == "envelope22") return envelope22(params);
  if (name == "formula24") return formula24(params);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

int exitCodeFor(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass:
      return 0;
    case CheckVerdict::Fail:
      return 2;
    case CheckVerdict::Inconclusive:
    case CheckVerdict::NotApplicable:
      return 3;
  }
  return 3;
}

RegionSet randomGrainSet(Rng& rng, int dim, double R, double fraction) {
  if (!(fraction > 0.0 && fraction < 0.5)) throw std::invalid_argument("randomGrainSet: fraction must lie in (0, 0.5)");
  const int count = 1 + rng.index(6);
  const double rad = R * std::pow(fraction / count, 1.0 / dim);
  std::vector<Point> centers;
  std::vector<double> radii;
  for (int tries = 0; static_cast<int>(centers.size()) < count; ++tries) {
    if (tries > 100000) throw std::runtime_error("randomGrainSet: could not place disjoint grains");
    const Point c = uniformInBall(rng, Point(dim), R - rad);
    bool ok = true;
    for (const Point& o : centers) ok = ok && distance(o, c) > 2.0 * rad * (1.0 + 1e-9);
    if (!ok) continue;
    centers.push_back(c);
    radii.push_back(rad);
  }
  return ballUnion(std::move(centers), std::move(radii));
}

RearrangementInstance randomRearrangementInstance(Rng& rng, int dim) {
  const BallRegion omega{Point(dim), rng.uniform(0.5, 1.5)};
  const Point x = uniformInBall(rng, omega.center, omega.radius);
  std::vector<Box> boxes;
  auto box = [&](const Point& c, double scale) {
    Point lo = c, hi = c;
    for (int i = 0; i < dim; ++i) {
      lo[i] -= scale * rng.uniform(0.05, 1.0);
      hi[i] += scale * rng.uniform(0.05, 1.0);
    }
    boxes.push_back({lo, hi});
  };
  box(x, 0.3 * omega.radius);
  const int extra = rng.index(5);
  for (int k = 0; k < extra; ++k) box(uniformInBall(rng, omega.center, 1.5 * omega.radius), 0.4 * omega.radius);
  return {omega, boxUnion(std::move(boxes)), x};
}

ContactInstance randomContactInstance(Rng& rng, int dim) {
  const Point dir = randomDirection(rng, dim);
  switch (rng.index(4)) {
    case 0: {
      const double offset = rng.uniform(-1.0, 1.0);
      return {halfSpace(dir, offset), offset * dir};
    }
    case 1: {
      const double r = rng.uniform(0.3, 3.0);
      const Point c = uniformInBall(rng, Point(dim), 1.0);
      return {ball(c, r), c + r * randomDirection(rng, dim)};
    }
    case 2: {
      const double delta = rng.uniform(0.05, 0.5);
      Point x = uniformInBall(rng, Point(dim), 1.0);
      x[0] = delta * std::floor(rng.uniform(-4.0, 4.0));
      return {periodicSlab(dim, delta), x};
    }
    default: {
      const double r = rng.uniform(0.5, 2.0);
      const Point c = uniformInBall(rng, Point(dim), 1.0);
      return {ballComplement(c, r), c + r * randomDirection(rng, dim)};
    }
  }
}

}  // namespace nlgeom
