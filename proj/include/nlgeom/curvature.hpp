#pragma once

#include <string>
#include <vector>

#include "nlgeom/kernels.hpp"
#include "nlgeom/quad.hpp"
#include "nlgeom/sets.hpp"

namespace nlgeom {

enum class Verdict { Converged, DivergedPlus, DivergedMinus, Inconclusive };

std::string verdictName(Verdict v);

struct PvEstimate {
  Verdict verdict = Verdict::Inconclusive;
  double value = 0.0;            // NaN unless Converged
  double growthExponent = 0.0;   // -d log(shell) / d log(eps) over the trailing shells
  std::vector<ShellIntegral> nearField;  // [eps_k, eps_{k-1}), k = 1..kMax
  double farField = 0.0;         // integral over [eps0, R_out)
  double farFieldError = 0.0;
  double tail = 0.0;             // analytic bound beyond R_out
  double innerRemainder = 0.0;   // estimate of the unsampled part inside eps_kMax
  double errorBound = 0.0;
  std::vector<double> partialSums;  // S_0 = farField, S_k = S_{k-1} + nearField[k-1]
  double ballTerm = 0.0;         // touching-ball method: -curv_B(x)
  double ballTermError = 0.0;
};

/// curv of B_1(e_1) at 0 for K = |y|^{-d-s}:
/// 2^{1-s} pi^{(d-1)/2} Gamma((1-s)/2) / (s Gamma((d-s)/2)).
double ballCurvatureExact(int dim, double s);

/// Principal value of ∫ χ̃_E(y) K(x-y) dy at x on ∂E via antipodal pairing.
PvEstimate curvaturePV(const RegionSet& set, const KernelSpec& kernel, const Point& x, const QuadConfig& cfg);

struct TouchingBallOptions {
  double ceilingFactor = 10.0;  // divergence needs 2∫ above ceilingFactor * |curv_B|
  int verifySamples = 10000;
};

/// curv_E(x) = -curv_B(x) + 2 ∫_{R^d \ (E ∪ B)} K(x-y) dy for an exterior ball B touching at x.
PvEstimate curvatureViaTouchingBall(const RegionSet& set, const KernelSpec& kernel, const TouchingBall& ball,
                                    const QuadConfig& cfg, const TouchingBallOptions& options = {});

struct TruncatedIntegral {
  double value = 0.0;
  double statError = 0.0;
  double tail = 0.0;
  double errorBound = 0.0;  // 3 statError + tail + rounding allowance
};

/// ∫_{inner < |y-x| < outer} χ̃_E(y) K(x-y) dy (tail = 0 here).
TruncatedIntegral annulusChiIntegral(const RegionSet& set, const KernelSpec& kernel, const Point& x, double inner,
                                     double outer, const QuadConfig& cfg);

/// ∫_{|y-x| > r} χ̃_E(y) K(x-y) dy (no principal value needed).
TruncatedIntegral curvatureLowerBoundTruncated(const RegionSet& set, const KernelSpec& kernel, const Point& x,
                                               double r, const QuadConfig& cfg);

}  // namespace nlgeom
