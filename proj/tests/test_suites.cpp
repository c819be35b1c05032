#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlgeom/measure.hpp"
#include "nlgeom/suites.hpp"

using namespace nlgeom;

namespace {

SuiteParams small(int trials, int points) {
  SuiteParams p;
  p.trials = trials;
  p.points = points;
  p.cfg.outerRadius = 1e12;
  p.cfg.kMax = 40;
  return p;
}

}  // namespace

TEST_CASE("suite registry and exit codes") {
  const auto& names = suiteNames();
  CHECK(names.size() == 10);
  for (const char* n : {"lemma31", "lemma32", "lemma33", "lemma41", "lemma42", "thm12", "thm16", "cor15",
                        "envelope22", "formula24"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK_THROWS_AS(runSuite("lemma99", small(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(runSuite("lemma32", small(0, 1)), std::invalid_argument);
  CHECK(exitCodeFor(CheckVerdict::Pass) == 0);
  CHECK(exitCodeFor(CheckVerdict::Fail) == 2);
  CHECK(exitCodeFor(CheckVerdict::Inconclusive) == 3);
  CHECK(exitCodeFor(CheckVerdict::NotApplicable) == 3);
}

TEST_CASE("instance generators") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const double R = 4.0, f = 0.01;
    const RegionSet e = randomGrainSet(rng, 2, R, f);
    const auto& p = e.descriptor().params;
    const auto radii = p.at("radii").get<std::vector<double>>();
    double vol = 0.0;
    for (double r : radii) vol += ballVolume(2, r);
    CHECK(vol == doctest::Approx(f * ballVolume(2, R)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(randomGrainSet(rng, 2, 1.0, 0.5), std::invalid_argument);

  for (int d = 1; d <= 3; ++d) {
    for (int t = 0; t < 40; ++t) {
      const ContactInstance c = randomContactInstance(rng, d);
      CHECK(c.set.onBoundary(c.contact));
      const RearrangementInstance r = randomRearrangementInstance(rng, d);
      CHECK(r.set.membership(r.x) == Membership::Inside);
      CHECK(distance(r.x, r.omega.center) < r.omega.radius);
    }
  }
}

TEST_CASE("exact suites on small counts") {
  SUBCASE("lemma31") {
    const SuiteReport r = runSuite("lemma31", small(2, 1));
    CHECK(r.verdict == CheckVerdict::Pass);
    CHECK(r.passed == 2);
  }
  SUBCASE("lemma32") {
    const SuiteReport r = runSuite("lemma32", small(10, 1));
    CHECK(r.verdict == CheckVerdict::Pass);
    CHECK(r.passed == 10);
  }
  SUBCASE("envelope22") {
    const SuiteReport r = runSuite("envelope22", small(1, 2));
    CHECK(r.verdict == CheckVerdict::Pass);
    CHECK(r.total == 6);
  }
  SUBCASE("formula24") {
    const SuiteReport r = runSuite("formula24", small(6, 1));
    CHECK(r.failed == 0);
    CHECK(r.passed + r.notApplicable == r.total);
  }
  SUBCASE("cor15") {
    SuiteParams p = small(5, 1);
    p.radii = {0.1, 1.0};
    const SuiteReport r = runSuite("cor15", p);
    CHECK(r.verdict == CheckVerdict::Pass);
    CHECK(r.total == 4 + 5);
  }
}

TEST_CASE("density-bound suite gates on the subsolution scan") {
  SuiteParams p = small(1, 4);
  p.radii = {1.0, 4.0};
  const SuiteReport slab = runSuite("thm12", p);
  CHECK(slab.verdict == CheckVerdict::Pass);
  for (const auto& row : slab.details.at("radii")) CHECK(row.at("margin").get<double>() > 1000.0);

  p.scene = ball(Point{1.0, 0.0}, 1.0);
  const SuiteReport b = runSuite("thm12", p);
  CHECK(b.verdict == CheckVerdict::NotApplicable);
  CHECK(exitCodeFor(b.verdict) == 3);

  p.scene = ball(Point{2.0, 0.0}, 1.0);
  const SuiteReport off = runSuite("thm12", p);
  CHECK(off.verdict == CheckVerdict::NotApplicable);
}

TEST_CASE("statistical suites on a few dust points") {
  for (const char* name : {"lemma33", "lemma41"}) {
    CAPTURE(name);
    const SuiteReport r = runSuite(name, small(1, 3));
    CHECK(r.failed == 0);
    CHECK(r.verdict == CheckVerdict::Pass);
  }
}

TEST_CASE("suites are deterministic for a seed") {
  SuiteParams p = small(4, 1);
  p.seed = 5;
  const auto a = runSuite("lemma32", p).toJson().dump();
  const auto b = runSuite("lemma32", p).toJson().dump();
  CHECK(a == b);
  p.cfg.exec = Exec::Serial;
  CHECK(runSuite("lemma32", p).toJson().dump() == a);
  p.seed = 6;
  CHECK(runSuite("lemma32", p).toJson().dump() != a);
}
