#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlgeom/measure.hpp"
#include "nlgeom/sets.hpp"
#include "oracles.hpp"

using namespace nlgeom;

namespace {

std::vector<RegionSet> canonicalZoo(int d) {
  std::vector<RegionSet> zoo{halfSpace(Point::unit(d, 0)),
                             ball(Point(d), 1.0),
                             ballComplement(Point::unit(d, 0), 0.5),
                             slab(d, -0.25, 0.5),
                             periodicSlab(d, 0.1)};
  if (d >= 2) zoo.push_back(coneSector(Point(d), Point::unit(d, d - 1), 0.6));
  if (d >= 2) {
    Point lo(d), hi(d), lo2(d), hi2(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = -0.5;
      hi[i] = 0.2;
      lo2[i] = 0.0;
      hi2[i] = 0.7;
    }
    zoo.push_back(boxUnion({Box{lo, hi}, Box{lo2, hi2}}));
  }
  return zoo;
}

}  // namespace

TEST_CASE("tildeChi on trivial points") {
  const RegionSet h = halfSpace(Point{1.0, 0.0});
  CHECK(tildeChi(h, Point{-1.0, 0.0}) == -1);
  CHECK(tildeChi(h, Point{0.0, 0.0}) == 0);
  CHECK(tildeChi(ball(Point{0.0, 0.0}, 1.0), Point{2.0, 0.0}) == 1);
}

TEST_CASE("canonical examples") {
  const RegionSet h = canonicalSet("halfSpace", {{"normal", {1.0, 0.0}}}, 2);
  CHECK(h.membership(Point{-0.3, 5.0}) == Membership::Inside);
  CHECK(h.membership(Point{0.3, -5.0}) == Membership::Outside);

  const RegionSet p = canonicalSet("periodicSlab", {{"delta", 0.1}}, 2);
  CHECK(p.membership(Point{0.05, 3.7}) == Membership::Inside);
  CHECK(p.membership(Point{0.15, 3.7}) == Membership::Outside);
  CHECK(p.membership(Point{-0.05, 3.7}) == Membership::Outside);
  CHECK(p.membership(Point{0.0, 3.7}) == Membership::Boundary);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(canonicalSet("torus", {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("periodicSlab", {{"delta", 0.0}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("periodicSlab", {{"delta", -1.0}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("sparseDust", {{"seed", 1}, {"target", 1.5}, {"scale", 0.01}}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("sparseDust", {{"seed", 1}, {"target", 0.0}, {"scale", 0.01}}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("sparseDust", {{"target", 0.1}, {"scale", 0.01}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("ball", {{"radius", -1.0}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(canonicalSet("ball", {{"center", {0.0}}}, 2), std::invalid_argument);
}

TEST_CASE("membership agrees with the sign field") {
  for (int d = 1; d <= 3; ++d) {
    Rng rng(11 + d);
    for (const RegionSet& e : canonicalZoo(d)) {
      for (int i = 0; i < 4000; ++i) {
        const Point x = uniformInBall(rng, Point(d), 2.0);
        const Membership m = e.membership(x);
        const double s = e.sign(x);
        INFO(e.descriptor().name, " at ", formatPoint(x));
        if (m == Membership::Inside) CHECK(s < 0.0);
        if (m == Membership::Outside) CHECK(s > 0.0);
        if (m == Membership::Boundary) CHECK(s == 0.0);
      }
    }
  }
}

TEST_CASE("complement is an involution and flips tildeChi") {
  Rng rng(3);
  for (const RegionSet& e : canonicalZoo(2)) {
    const RegionSet c = e.complement();
    const RegionSet cc = c.complement();
    for (int i = 0; i < 2000; ++i) {
      const Point x = uniformInBall(rng, Point(2), 2.0);
      CHECK(cc.membership(x) == e.membership(x));
      if (tildeChi(e, x) != 0) CHECK(tildeChi(c, x) == -tildeChi(e, x));
    }
  }
}

TEST_CASE("declared symmetry tags hold under sampling") {
  for (int d = 1; d <= 3; ++d) {
    Rng rng(100 + d);
    for (const RegionSet& e : canonicalZoo(d)) {
      for (const SymmetryTag& tag : e.symmetries()) {
        for (int i = 0; i < 1000; ++i) {
          const Point x = uniformInBall(rng, Point(d), 1.5);
          if (e.membership(x) == Membership::Boundary) continue;
          if (tag.kind == SymmetryKind::ScaleInvariant) {
            const double f = std::exp(rng.uniform(-3.0, 3.0));
            CHECK(e.membership(tag.origin + f * (x - tag.origin)) == e.membership(x));
            continue;
          }
          const int k = tag.period > 0.0 ? rng.index(21) - 10 : 0;
          const Point y = reflectAcross(x, tag.normal, tag.offset + k * tag.period);
          INFO(e.descriptor().name);
          if (tag.kind == SymmetryKind::ReflectionSwap) {
            const Membership my = e.membership(y);
            if (my != Membership::Boundary) CHECK(my != e.membership(x));
          } else {
            const Membership my = e.membership(y);
            if (my != Membership::Boundary) CHECK(my == e.membership(x));
          }
        }
      }
    }
  }
}

TEST_CASE("periodic slab reflection across every boundary plane swaps E") {
  const RegionSet p = periodicSlab(2, 0.1);
  Rng rng(5);
  const Point e1 = Point::unit(2, 0);
  for (int k = -20; k <= 20; ++k) {
    for (int i = 0; i < 100; ++i) {
      const Point x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      const Point y = reflectAcross(x, e1, 0.1 * k);
      if (p.membership(x) == Membership::Boundary || p.membership(y) == Membership::Boundary) continue;
      CHECK(p.membership(y) != p.membership(x));
    }
  }
}

TEST_CASE("chords match membership between crossings") {
  for (int d = 1; d <= 3; ++d) {
    Rng rng(40 + d);
    std::vector<RegionSet> zoo = canonicalZoo(d);
    zoo.push_back(sparseDust({d, 0.2, 0.05, 9, 1.0, Point(d), 200}));
    for (const RegionSet& e : zoo) {
      for (int i = 0; i < 300; ++i) {
        const Point o = uniformInBall(rng, Point(d), 1.0);
        const Point u = randomDirection(rng, d);
        const double tmin = -1.5, tmax = 1.7;
        const Chord c = e.chord(o, u, tmin, tmax);
        std::vector<double> ts{tmin};
        ts.insert(ts.end(), c.crossings.begin(), c.crossings.end());
        ts.push_back(tmax);
        bool inside = c.startsInside;
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
          REQUIRE(ts[k] <= ts[k + 1]);
          if (ts[k + 1] - ts[k] > 1e-9) {
            const Point mid = o + 0.5 * (ts[k] + ts[k + 1]) * u;
            INFO(e.descriptor().name, " segment ", k);
            CHECK((e.membership(mid) == Membership::Inside) == inside);
          }
          inside = !inside;
        }
      }
    }
  }
}

TEST_CASE("closed-form volumes agree with a grid-count oracle") {
  for (int d = 1; d <= 3; ++d) {
    const int n = d == 1 ? 20000 : (d == 2 ? 800 : 120);
    const std::vector<RegionSet> sets{halfSpace(Point::unit(d, 0), 0.3), ball(Point::unit(d, 0), 1.0),
                                      ballComplement(Point(d), 0.7), slab(d, -0.2, 0.4), periodicSlab(d, 0.1)};
    for (const RegionSet& e : sets) {
      const Point c = 0.2 * Point::unit(d, 0);
      const double r = 0.9;
      const double exact = *e.volumeInBall(c, r) / ballVolume(d, r);
      INFO(e.descriptor().name, " d=", d);
      CHECK(std::abs(exact - oracle::gridFraction(e, c, r, n)) < 0.01);
    }
  }
  // Periodic slab centred on a plane: the 1-D slab-overlap oracle.
  const RegionSet p = periodicSlab(2, 0.1);
  CHECK(*p.volumeInBall(Point(2), 1.0) / ballVolume(2, 1.0) ==
        doctest::Approx(oracle::slabOverlapFraction(2, 0.1, 0.0, 1.0)).epsilon(1e-6));
}

TEST_CASE("sparse dust respects its dyadic density budget") {
  const double target = 0.01, scale = 1.0 / 256.0;
  const RegionSet dust = canonicalSet("sparseDust", {{"seed", 7}, {"target", target}, {"scale", scale}}, 2);
  CHECK(dust.descriptor().params.at("grains").get<int>() > 10);
  CHECK(dust.onBoundary(Point(2)));
  Rng rng(77);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    const auto x = dust.sampleBoundary(rng, BallRegion{Point(2), 1.0});
    REQUIRE(x.has_value());
    for (double r = scale; r <= 1.0; r *= 2.0) {
      const double frac = *dust.volumeInBall(*x, r) / ballVolume(2, r);
      CHECK(frac <= target);
      ++checked;
    }
  }
  // The exact lens sum is itself checked against grid counting.
  for (double r : {scale, 4.0 * scale, 32.0 * scale}) {
    const double exact = *dust.volumeInBall(Point(2), r) / ballVolume(2, r);
    CHECK(std::abs(exact - oracle::gridFraction(dust, Point(2), r, 1500)) < 2e-3);
  }
  CHECK(checked > 100);
}

TEST_CASE("sparse dust is deterministic in its seed") {
  const SparseDustParams p{2, 0.05, 0.01, 3, 1.0, Point(2), 500};
  const RegionSet a = sparseDust(p), b = sparseDust(p);
  CHECK(a.descriptor().params == b.descriptor().params);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Point x = uniformInBall(rng, Point(2), 1.0);
    CHECK(a.membership(x) == b.membership(x));
  }
}

TEST_CASE("local membership matches global membership away from round-off") {
  Rng rng(21);
  const RegionSet dust = sparseDust({2, 0.2, 0.05, 4, 1.0, Point(2), 300});
  for (const RegionSet& e : {ball(Point{0.3, -0.2}, 0.8), periodicSlab(2, 0.1), slab(2, -0.2, 0.3),
                             coneSector(Point{0.1, 0.0}, Point{0.0, 1.0}, 0.7), dust}) {
    for (int i = 0; i < 200; ++i) {
      const auto a = e.sampleBoundary(rng, BallRegion{Point(2), 1.0});
      REQUIRE(a.has_value());
      for (int j = 0; j < 20; ++j) {
        const Point h = std::exp(rng.uniform(-6.0, 0.0)) * randomDirection(rng, 2);
        const Point y = *a + h;
        if (std::abs(e.sign(y)) < 1e-9) continue;
        INFO(e.descriptor().name);
        CHECK(e.localMembership(*a, h) == e.membership(y));
      }
    }
  }
}

TEST_CASE("local membership resolves tiny offsets on a curved boundary") {
  const RegionSet b = ball(Point{0.0, 0.0}, 1.0);
  const Point x{1.0, 0.0};
  for (double eps = 1e-4; eps > 1e-14; eps *= 0.1) {
    // Tangent step stays outside the disc; inward-tilted step goes inside.
    CHECK(b.localMembership(x, Point{0.0, eps}) == Membership::Outside);
    CHECK(b.localMembership(x, Point{-eps * eps, eps}) == Membership::Inside);
  }
}

TEST_CASE("findExteriorBall on smooth boundaries") {
  const ExteriorBallResult rb = findExteriorBall(ball(Point{0.0, 0.0}, 1.0), Point{1.0, 0.0}, 1.0);
  REQUIRE(rb.ball.has_value());
  CHECK(rb.ball->radius == doctest::Approx(1.0));
  CHECK(rb.ball->center[0] == doctest::Approx(2.0));
  CHECK(std::abs(distance(rb.ball->contact, rb.ball->center) - rb.ball->radius) < 1e-12);

  const ExteriorBallResult rh = findExteriorBall(halfSpace(Point{1.0, 0.0, 0.0}), Point(3), 1.0);
  REQUIRE(rh.ball.has_value());
  CHECK(rh.ball->center[0] == doctest::Approx(rh.ball->radius));
  CHECK(rh.ball->center[1] == doctest::Approx(0.0).epsilon(1e-9));

  // Interior of the unit disc seen from its complement: radius capped by curvature.
  const ExteriorBallResult rc = findExteriorBall(ballComplement(Point{0.0, 0.0}, 1.0), Point{1.0, 0.0}, 4.0);
  REQUIRE(rc.ball.has_value());
  CHECK(rc.ball->radius <= 1.0 + 1e-12);
  CHECK(rc.ball->radius > 0.95);
}

TEST_CASE("findExteriorBall reports failures without throwing") {
  const ExteriorBallResult off = findExteriorBall(ball(Point{0.0, 0.0}, 1.0), Point{0.5, 0.0}, 1.0);
  CHECK_FALSE(off.ball.has_value());
  CHECK(off.reason == "point is not on the boundary");

  // Reflex corner of an L-shaped union: the complement is a quarter plane there.
  const RegionSet ell = boxUnion({Box{Point{-1.0, -1.0}, Point{0.0, 1.0}}, Box{Point{-1.0, -1.0}, Point{1.0, 0.0}}});
  const Point corner{0.0, 0.0};
  CHECK(ell.membership(Point{0.01, 0.01}) == Membership::Outside);
  const ExteriorBallResult r = findExteriorBall(ell, corner, 0.5);
  CHECK_FALSE(r.ball.has_value());

  // Dense rejection oracle: every tangent ball at the corner meets E.
  Rng rng(8);
  for (int k = 0; k < 64; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / 64.0;
    const Point n{std::cos(ang), std::sin(ang)};
    for (double rad = 0.5; rad > 1e-3; rad *= 0.5) {
      bool meets = false;
      for (int i = 0; i < 10000 && !meets; ++i) {
        const Point y = uniformInBall(rng, corner + rad * n, rad);
        meets = ell.membership(y) == Membership::Inside;
      }
      CHECK(meets);
    }
  }
}

TEST_CASE("returned touching balls pass an independent rejection check") {
  Rng rng(12);
  const RegionSet dust = sparseDust({2, 0.05, 1.0 / 64.0, 5, 1.0, Point(2), 800});
  const std::vector<RegionSet> sets{ball(Point{0.2, 0.1}, 0.7), periodicSlab(2, 0.1), dust,
                                    coneSector(Point(2), Point{0.0, 1.0}, 0.9)};
  for (const RegionSet& e : sets) {
    for (int i = 0; i < 5; ++i) {
      const auto x = e.sampleBoundary(rng, BallRegion{Point(2), 0.8});
      REQUIRE(x.has_value());
      const auto res = findExteriorBall(e, *x, 0.25);
      if (!res.ball) continue;
      const TouchingBall& b = *res.ball;
      int violations = 0;
      for (int k = 0; k < 10000; ++k) {
        const Point y = uniformInBall(rng, b.center, b.radius * (1.0 - 1e-9));
        if (e.membership(y) == Membership::Inside) ++violations;
      }
      INFO(e.descriptor().name);
      CHECK(violations == 0);
    }
  }
}

TEST_CASE("scene json round trip") {
  for (const RegionSet& e : canonicalZoo(2)) {
    const nlohmann::json j = sceneToJson(e);
    const RegionSet back = sceneFromJson(j);
    CHECK(back.descriptor().name == e.descriptor().name);
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
      const Point x = uniformInBall(rng, Point(2), 2.0);
      CHECK(back.membership(x) == e.membership(x));
    }
  }
}

TEST_CASE("scaled sets") {
  const RegionSet b = ball(Point{1.0, 0.0}, 1.0);
  const RegionSet big = b.scaled(3.0);
  CHECK(big.membership(Point{5.9, 0.0}) == Membership::Inside);
  CHECK(big.membership(Point{6.1, 0.0}) == Membership::Outside);
  CHECK(*big.volumeInBall(Point{3.0, 0.0}, 3.0) == doctest::Approx(ballVolume(2, 3.0)));
  CHECK(big.featureScale() == doctest::Approx(3.0));
}
