#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlgeom/constants.hpp"

using namespace nlgeom;

namespace {

// mpmath (30 digits) evaluation of the formula chain.
struct Expected {
  const char* name;
  double value;
};

void checkAgainst(const ConstantLedger& L, std::initializer_list<Expected> want) {
  const auto rows = ledgerReport(L);
  for (const Expected& e : want) {
    CAPTURE(e.name);
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const LedgerRow& r) { return r.name == e.name; });
    REQUIRE(it != rows.end());
    CHECK(it->value == doctest::Approx(e.value).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("one-dimensional reference ledger") {
  const ConstantLedger L = buildLedger(1, 0.5, 1.0, 1.0, 0.0);
  checkAgainst(L, {{"Hball", 2.8284271247461901},
                   {"C1", 2.8284271247461901},
                   {"C4", 2.0},
                   {"C2", 2.0},
                   {"C3", 0.5},
                   {"beta", 0.029437251522859414},
                   {"CHL", 3.0},
                   {"theta", 0.041666666666666667},
                   {"C1shell", 1.6568542494923802},
                   {"C2shell", 5.6568542494923802},
                   {"gamma", 0.14644660940672624},
                   {"Cshell", 0.8284271247461901},
                   {"alphaThm12", 0.029437251522859414},
                   {"alphaThm16", 0.029437251522859414},
                   {"delta12", 0.0012265521467858089},
                   {"delta16", 0.0012265521467858089}});
}

TEST_CASE("two-dimensional ledgers") {
  checkAgainst(buildLedger(2, 0.5, 1.0, 1.0, 0.0), {{"Hball", 14.832597418410975},
                                                    {"C4", 6.2831853071795865},
                                                    {"C3", 0.59460355750136053},
                                                    {"beta", 0.00081436711490718955},
                                                    {"CHL", 9.0},
                                                    {"theta", 0.0034722222222222222},
                                                    {"C1shell", 5.205161138274292},
                                                    {"C2shell", 17.771531752633465},
                                                    {"gamma", 0.14644660940672624},
                                                    {"Cshell", 2.602580569137146},
                                                    {"delta12", 2.8276635934277415e-6},
                                                    {"delta16", 2.8276635934277415e-6}});
  checkAgainst(buildLedger(2, 0.5, 1.0, 2.0, 3.0), {{"C1", 29.665194836821951},
                                                    {"beta", 7.6494954521963584e-5},
                                                    {"C2shell", 35.54306350526693},
                                                    {"gamma", 0.073223304703363119},
                                                    {"delta12", 2.6560748097904022e-7}});
}

TEST_CASE("ledger has sixteen rows in a fixed order") {
  const auto rows = ledgerReport(buildLedger(3, 0.25, 1.0, 1.5, 1.0));
  REQUIRE(rows.size() == 16);
  CHECK(rows.front().name == "Hball");
  CHECK(rows.back().name == "delta16");
  for (const auto& r : rows) {
    CHECK(r.value > 0.0);
    CHECK_FALSE(r.formula.empty());
    CHECK_FALSE(r.anchor.empty());
  }
}

TEST_CASE("sanity corridor and ordering") {
  for (int d = 1; d <= 3; ++d) {
    for (double s : {0.25, 0.5, 0.75}) {
      const ConstantLedger L = buildLedger(d, s, 1.0, 1.0, 0.0);
      CHECK(L.delta12 > 0.0);
      CHECK(L.delta12 < 0.1);
      CHECK(L.delta16 <= L.delta12);
      CHECK(L.beta < 1.0);
      CHECK(L.gamma < 1.0);
      CHECK(L.theta < 1.0);
    }
  }
}

TEST_CASE("delta12 is nonincreasing in M and in Lambda / lambda") {
  for (int d = 1; d <= 3; ++d) {
    for (double s : {0.25, 0.5, 0.75}) {
      double prev = 1.0;
      for (double M = 0.0; M <= 64.0; M = M * 2.0 + 0.5) {
        const double v = buildLedger(d, s, 1.0, 1.0, M).delta12;
        CHECK(v <= prev);
        prev = v;
      }
      prev = 1.0;
      for (double ratio = 1.0; ratio <= 64.0; ratio *= 1.5) {
        const double v = buildLedger(d, s, 1.0, ratio, 0.0).delta12;
        CHECK(v <= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("beta depends on lambda, Lambda and M + 1 only through ratios") {
  const ConstantLedger a = buildLedger(2, 0.5, 1.0, 2.0, 1.0);
  const double c = 3.0;
  const ConstantLedger b = buildLedger(2, 0.5, c, 2.0 * c, c * (1.0 + 1.0) - 1.0);
  CHECK(b.beta == doctest::Approx(a.beta).epsilon(1e-13));
}

TEST_CASE("ledgers differing in M differ only in the M-dependent rows") {
  const auto a = ledgerReport(buildLedger(2, 0.5, 1.0, 1.0, 0.0));
  const auto b = ledgerReport(buildLedger(2, 0.5, 1.0, 1.0, 5.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool dependsOnM = a[i].name == "beta" || a[i].name.rfind("alpha", 0) == 0 || a[i].name.rfind("delta", 0) == 0;
    CAPTURE(a[i].name);
    if (dependsOnM) {
      CHECK(a[i].value != b[i].value);
    } else {
      CHECK(a[i].value == b[i].value);
    }
  }
}

TEST_CASE("beta goes to zero as M grows") {
  double prev = 1.0;
  for (double M = 1.0; M < 1e12; M *= 10.0) {
    const double beta = buildLedger(2, 0.5, 1.0, 1.0, M).beta;
    CHECK(beta < prev);
    prev = beta;
  }
  CHECK(prev < 1e-20);
}

TEST_CASE("csv round trip") {
  const ConstantLedger L = buildLedger(2, 0.3, 0.7, 1.9, 2.5);
  const std::string csv = ledgerToCsv(L);
  CHECK(ledgerFromCsv(csv) == L);
  CHECK(csv.find("name,value,formula,anchor") != std::string::npos);
  std::string tampered = csv;
  const auto pos = tampered.find("\nbeta,");
  tampered.replace(pos + 6, 1, "9");
  CHECK_THROWS_AS(ledgerFromCsv(tampered), std::invalid_argument);
  CHECK_THROWS_AS(ledgerFromCsv("name,value\n"), std::invalid_argument);
  CHECK_FALSE(ledgerText(L).empty());
}

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(buildLedger(0, 0.5, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(buildLedger(2, 1.0, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(buildLedger(2, 0.5, 2.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(buildLedger(2, 0.5, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(buildLedger(2, 0.5, 1.0, 1.0, -1.0), std::invalid_argument);
}
