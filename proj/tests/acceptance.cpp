// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nlgeom/constants.hpp"
#include "nlgeom/curvature.hpp"
#include "nlgeom/density.hpp"
#include "nlgeom/measure.hpp"
#include "nlgeom/perimeter.hpp"
#include "nlgeom/suites.hpp"

using namespace nlgeom;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

QuadConfig wide(std::uint64_t seed = 1) {
  QuadConfig c;
  c.outerRadius = 1e12;
  c.kMax = 40;
  c.seed = seed;
  return c;
}

SuiteParams params(int trials, int points) {
  SuiteParams p;
  p.trials = trials;
  p.points = points;
  p.cfg = wide();
  return p;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. PV curvature of B_1(e_1) at 0 against the Gamma formula, and 2^{1-s}/s for d = 1.
Outcome ballExactness() {
  Outcome o{true, ""};
  double worst = 0.0, slowest = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (double s : {0.25, 0.5, 0.75}) {
      const auto t0 = std::chrono::steady_clock::now();
      Point c(d);
      c[0] = 1.0;
      const PvEstimate pv = curvaturePV(ball(c, 1.0), fractionalKernel(d, s), Point(d), wide(d * 10 + 1));
      const double t = seconds(t0);
      slowest = std::max(slowest, t);
      const double exact = ballCurvatureExact(d, s);
      double rel = std::abs(pv.value - exact) / exact;
      if (d == 1) rel = std::max(rel, std::abs(pv.value - std::pow(2.0, 1.0 - s) / s) / (std::pow(2.0, 1.0 - s) / s));
      const bool ok = pv.verdict == Verdict::Converged && rel <= 1e-2 && t <= 120.0;
      if (!ok) o.detail += " [d=" + std::to_string(d) + " s=" + fmt("%g", s) + " rel " + fmt("%.3g", rel) + "]";
      o.pass = o.pass && ok;
      worst = std::max(worst, std::isfinite(rel) ? rel : 1.0);
    }
  }
  o.detail = fmt("max rel error %.2e, slowest case %.1fs", worst, slowest) + o.detail;
  return o;
}

// 2. Half-space and periodicSlab(0.1) boundary curvature converges to 0.
Outcome symmetryZeros() {
  Outcome o{true, ""};
  Rng rng(2);
  const RegionSet hs = halfSpace(Point{0.0, 1.0});
  const RegionSet ps = periodicSlab(2, 0.1);
  const KernelSpec k = fractionalKernel(2, 0.5);
  double maxBound = 0.0, maxValue = 0.0;
  int good = 0;
  for (int i = 0; i < 32; ++i) {
    const bool slab = i >= 16;
    const Point x = slab ? Point{0.1 * std::floor(rng.uniform(-20.0, 20.0)), rng.uniform(-5.0, 5.0)}
                         : Point{rng.uniform(-5.0, 5.0), 0.0};
    const PvEstimate pv = curvaturePV(slab ? ps : hs, k, x, wide(200 + i));
    const bool ok = pv.verdict == Verdict::Converged && pv.errorBound <= 1e-2 && std::abs(pv.value) <= pv.errorBound;
    good += ok ? 1 : 0;
    maxBound = std::max(maxBound, pv.errorBound);
    maxValue = std::max(maxValue, std::isfinite(pv.value) ? std::abs(pv.value) : 1.0);
  }
  o.pass = good == 32;
  o.detail = std::to_string(good) + "/32 points, " + fmt("max |value| %.2e, max errorBound %.2e", maxValue, maxBound);
  return o;
}

// 3. Anisotropic envelope with lambda = 1, Lambda = 2.
Outcome envelope() {
  SuiteParams p = params(1, 8);
  p.kernel = anisotropicKernel(2, 0.5, {1.5, 0.0, 0.5});
  Outcome o;
  if (p.kernel->lambda() != 1.0 || p.kernel->Lambda() != 2.0) return {false, "kernel bounds are not (1, 2)"};
  const SuiteReport r = runSuite("envelope22", p);
  o.pass = r.verdict == CheckVerdict::Pass && r.total == 24;
  o.detail = std::to_string(r.passed) + "/" + std::to_string(r.total) + " (8 points x r in {0.5, 1, 2})";
  return o;
}

// 4. PV against the touching-ball formula on 20 random pairs.
Outcome touchingBall() {
  SuiteParams p = params(20, 1);
  p.cfg.samplesPerShell = 16384;
  const SuiteReport r = runSuite("formula24", p);
  return {r.verdict == CheckVerdict::Pass && r.passed == 20,
          std::to_string(r.passed) + "/20 pairs within the combined errorBound"};
}

// 5. Per_s(rE) = r^{d-s} Per_s(E) and curv_{rE}(rx) = r^{-s} curv_E(x).
Outcome scalingLaws() {
  Rng rng(5);
  int perOk = 0, curvOk = 0, curvTried = 0;
  double worstPer = 0.0, worstCurv = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double r = std::exp(rng.uniform(std::log(0.5), std::log(4.0)));
    const double s = 0.5;
    // Perimeter: a box union in the unit window, relative to a ball containing it.
    std::vector<Box> boxes;
    for (int k = 0; k < 1 + static_cast<int>(rng.index(3)); ++k) {
      const Point c{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
      boxes.push_back({c - Point{rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3)},
                       c + Point{rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3)}});
    }
    QuadConfig pc;
    pc.seed = 500 + t;
    const ScalingRatio sr = perimeterScalingCheck(boxUnion(boxes), BallRegion{Point(2), 1.0}, r, s, pc);
    const double dev = std::abs(sr.ratio - sr.expected) / std::max(sr.statError, 1e-300);
    worstPer = std::max(worstPer, dev);
    perOk += std::abs(sr.ratio - sr.expected) <= 3.0 * sr.statError ? 1 : 0;

    // Curvature: a canonical set and contact point with nonzero curvature.
    const ContactInstance inst = randomContactInstance(rng, 2);
    const KernelSpec k = fractionalKernel(2, s);
    const PvEstimate a = curvaturePV(inst.set, k, inst.contact, wide(600 + t));
    const PvEstimate b = curvaturePV(inst.set.scaled(r), k, r * inst.contact, wide(700 + t));
    ++curvTried;
    if (a.verdict == Verdict::Converged && b.verdict == Verdict::Converged) {
      const double gap = std::abs(b.value - std::pow(r, -s) * a.value);
      const double bound = b.errorBound + std::pow(r, -s) * a.errorBound;
      worstCurv = std::max(worstCurv, gap / bound);
      curvOk += gap <= bound ? 1 : 0;
    }
  }
  return {perOk == 10 && curvOk == 10,
          "perimeter " + std::to_string(perOk) + "/10 (worst " + fmt("%.2f sigma", worstPer) + "), curvature " +
              std::to_string(curvOk) + "/" + std::to_string(curvTried) + fmt(" (worst gap/bound %.2f)", worstCurv)};
}

// 6. Brute-force sparse-point measure on 20 seeded sets, 256^2 grid over B_{R/4}.
Outcome sparsePoints() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteReport r = runSuite("lemma31", params(20, 1));
  const double t = seconds(t0);
  return {r.verdict == CheckVerdict::Pass && r.passed == 20 && t <= 300.0,
          std::to_string(r.passed) + "/20 sets, " + fmt("%.1fs", t)};
}

// 7. Rearrangement inequality on 200 instances plus equality cases.
Outcome rearrangement() {
  const SuiteReport r = runSuite("lemma32", params(200, 1));
  int eq = 0;
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const BallRegion omega{Point(2), 1.0};
    const Point x = uniformInBall(rng, Point(2), 0.5);
    const double rho = rng.uniform(0.05, 0.45);
    QuadConfig c;
    c.seed = 800 + t;
    const RearrangementResult res = rearrangementCheck(omega, ball(x, rho), x, 0.5, c);
    const double sigma = std::hypot(res.lhsError, res.rhsError);
    eq += res.verdict == CheckVerdict::Pass && std::abs(res.lhs - res.rhs) <= 3.0 * sigma + 1e-9 * res.lhs ? 1 : 0;
  }
  return {r.verdict == CheckVerdict::Pass && r.passed == 200 && eq == 10,
          std::to_string(r.passed) + "/200 instances, equality cases " + std::to_string(eq) + "/10"};
}

// 8. Dust at beta/2 and gamma/2: thresholds, shell bound and blow-up at 50 points each.
Outcome dust() {
  Outcome o{true, ""};
  for (const char* name : {"lemma33", "lemma41", "lemma42"}) {
    const SuiteReport r = runSuite(name, params(1, 50));
    const bool ok = r.failed == 0 && r.passed >= 45 && r.total == 50 && r.verdict == CheckVerdict::Pass;
    o.pass = o.pass && ok;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + name + " " + std::to_string(r.passed) + "/50 (" +
                std::to_string(r.failed) + " fail)";
    if (std::string(name) == "lemma42") {
      double worst = 0.0;
      for (const auto& row : r.details.at("points")) {
        if (!row.at("slope").is_null()) worst = std::max(worst, std::abs(row.at("slope").get<double>() + 0.5) / 0.5);
      }
      o.detail += fmt(", worst slope deviation %.2f%%", 100.0 * worst);
      o.pass = o.pass && worst <= 0.1;
    }
  }
  return o;
}

// 9. Density lower bound over 4 decades of R on verified subsolutions.
Outcome densityTheorem() {
  Outcome o{true, ""};
  const ConstantLedger L = buildLedger(2, 0.5, 1.0, 1.0, 0.0);
  for (int which = 0; which < 2; ++which) {
    SuiteParams p = params(1, 8);
    p.scene = which == 0 ? halfSpace(Point{0.0, 1.0}) : periodicSlab(2, 0.1);
    p.radii = {0.1, 1.0, 10.0, 100.0, 1000.0};
    const SuiteReport r = runSuite("thm12", p);
    double minMargin = INFINITY;
    for (const auto& row : r.details.at("radii")) {
      if (row.contains("margin")) minMargin = std::min(minMargin, row.at("margin").get<double>());
    }
    o.pass = o.pass && r.verdict == CheckVerdict::Pass && r.passed == 5;
    o.detail += std::string(which == 0 ? "half-space " : ", periodicSlab ") + std::to_string(r.passed) + "/5" +
                fmt(" (min density/delta12 = %.4g)", minMargin);
  }
  o.detail += fmt(", delta12 = %.3e", L.delta12);
  return o;
}

// 10. Minkowski perimeter of periodicSlab(delta) in B_1 doubles as delta halves.
Outcome minkowskiGrowth() {
  std::vector<double> per;
  for (double delta : {0.1, 0.05, 0.025}) {
    QuadConfig c;
    c.seed = 1000 + static_cast<std::uint64_t>(1.0 / delta);
    per.push_back(classicalPerimeterMinkowski(periodicSlab(2, delta), BallRegion{Point(2), 1.0}, delta / 16.0, c).value);
  }
  const double r1 = per[1] / per[0], r2 = per[2] / per[1];
  const bool ok = std::abs(r1 - 2.0) <= 0.3 && std::abs(r2 - 2.0) <= 0.3;
  return {ok, fmt("ratios %.4f, %.4f", r1, r2) + fmt(" (Per = %.3f ... %.3f)", per[0], per[2])};
}

// 11. Averaging identity on 50 instances and Per_alpha(E; B_r) >= delta Per_alpha(B_r).
Outcome fractionalSB() {
  Outcome o{true, ""};
  for (int which = 0; which < 2; ++which) {
    SuiteParams p = params(which == 0 ? 50 : 1, 1);
    p.scene = which == 0 ? periodicSlab(2, 0.1) : halfSpace(Point{0.0, 1.0});
    p.radii = {0.1, 1.0, 10.0, 100.0};
    const SuiteReport r = runSuite("cor15", p);
    o.pass = o.pass && r.verdict == CheckVerdict::Pass;
    o.detail += std::string(which == 0 ? "periodicSlab " : ", half-space ") + std::to_string(r.passed) + "/" +
                std::to_string(r.total);
  }
  o.detail += " (alpha in {0.5, 1}, r in [0.1, 100], 50 identity instances)";
  return o;
}

// 12. Repeated runs with one seed, serial and parallel, are bit-identical.
Outcome determinism() {
  std::vector<std::function<std::string(Exec)>> runs = {
      [](Exec e) {
        SuiteParams p = params(20, 1);
        p.cfg.exec = e;
        return runSuite("lemma32", p).toJson().dump();
      },
      [](Exec e) {
        SuiteParams p = params(2, 1);
        p.cfg.exec = e;
        return runSuite("lemma31", p).toJson().dump();
      },
      [](Exec e) {
        SuiteParams p = params(4, 1);
        p.cfg.exec = e;
        return runSuite("formula24", p).toJson().dump();
      },
      [](Exec e) {
        SuiteParams p = params(1, 3);
        p.cfg.exec = e;
        return runSuite("lemma42", p).toJson().dump();
      },
      [](Exec e) {
        SuiteParams p = params(5, 1);
        p.cfg.exec = e;
        p.radii = {1.0, 10.0};
        return runSuite("cor15", p).toJson().dump();
      },
      [](Exec e) {
        QuadConfig c = wide(12);
        c.exec = e;
        const PvEstimate pv = curvaturePV(ball(Point{1.0, 0.0}, 1.0), fractionalKernel(2, 0.5), Point(2), c);
        QuadConfig window = c;
        window.outerRadius = 64.0;
        const PerimeterEstimate pe =
            perimeterK(periodicSlab(2, 0.1), BallRegion{Point(2), 1.0}, fractionalKernel(2, 0.5), window);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%a %a %a %a", pv.value, pv.errorBound, pe.value, pe.statError);
        return std::string(buf);
      },
  };
  int same = 0;
  for (auto& run : runs) {
    const std::string a = run(Exec::Parallel), b = run(Exec::Parallel), c = run(Exec::Serial);
    same += a == b && a == c ? 1 : 0;
  }
  return {same == static_cast<int>(runs.size()),
          std::to_string(same) + "/" + std::to_string(runs.size()) + " workloads identical across reruns and exec modes"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"ball curvature exactness", ballExactness},
      {"symmetry zeros", symmetryZeros},
      {"anisotropic envelope", envelope},
      {"PV vs touching ball", touchingBall},
      {"scaling laws", scalingLaws},
      {"sparse-point measure", sparsePoints},
      {"rearrangement", rearrangement},
      {"dust thresholds and blow-up", dust},
      {"density lower bound", densityTheorem},
      {"Minkowski perimeter growth", minkowskiGrowth},
      {"fractional SB chain", fractionalSB},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
