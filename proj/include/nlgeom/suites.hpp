#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlgeom/constants.hpp"
#include "nlgeom/density.hpp"
#include "nlgeom/kernels.hpp"
#include "nlgeom/quad.hpp"
#include "nlgeom/rng.hpp"
#include "nlgeom/sets.hpp"

namespace nlgeom {

/// Verification suites run by `nlgeom verify <suite>`.
const std::vector<std::string>& suiteNames();

struct SuiteParams {
  std::optional<RegionSet> scene;
  std::optional<KernelSpec> kernel;
  int dim = 2;       // used when no scene is given
  double s = 0.5;    // used when no kernel is given
  double M = 0.0;
  std::vector<double> radii;  // R sweep (thm12) or r sweep (cor15); suite defaults when empty
  int trials = 20;
  int points = 16;
  std::uint64_t seed = 1;
  QuadConfig cfg;
};

struct SuiteReport {
  std::string suite;
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  int total = 0;
  int passed = 0;
  int failed = 0;
  int inconclusive = 0;
  int notApplicable = 0;
  std::vector<std::string> lines;
  nlohmann::json details = nlohmann::json::object();

  void tally(CheckVerdict v);
  nlohmann::json toJson() const;
};

SuiteReport runSuite(const std::string& name, const SuiteParams& params);

/// Exit status for a verdict: 0 pass, 2 fail, 3 inconclusive or not applicable.
int exitCodeFor(CheckVerdict v);

// Random instance generators shared by the suites and the tests ------------------

/// 1 to 6 disjoint equal balls inside B_R(0) whose total volume is fraction * |B_R|.
RegionSet randomGrainSet(Rng& rng, int dim, double R, double fraction);

struct RearrangementInstance {
  BallRegion omega;
  RegionSet set;
  Point x;
};

/// Box union in the unit-scale window with x inside one of the boxes and inside Ω.
RearrangementInstance randomRearrangementInstance(Rng& rng, int dim);

struct ContactInstance {
  RegionSet set;
  Point contact;
};

/// A canonical set with a boundary point that has an exterior touching ball.
ContactInstance randomContactInstance(Rng& rng, int dim);

}  // namespace nlgeom
