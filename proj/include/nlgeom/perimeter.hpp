#pragma once

#include <cstdint>

#include "nlgeom/kernels.hpp"
#include "nlgeom/quad.hpp"
#include "nlgeom/sets.hpp"

namespace nlgeom {

struct PerimeterEstimate {
  double value = 0.0;
  double statError = 0.0;
  // Per_K = omegaOmega + complementOmega + omegaComplement (ordered pair regions).
  double omegaOmega = 0.0;
  double complementOmega = 0.0;
  double omegaComplement = 0.0;
  double omegaOmegaError = 0.0;
  double crossError = 0.0;
  double tail = 0.0;  // bound on pairs farther apart than cfg.outerRadius (value is low by at most this)
  bool lowPrecision = false;
};

/// Per_K(E; Omega) = 1/4 ∬_{Q(Omega)} |χ̃(x) - χ̃(y)| K(x - y), Omega a ball.
/// Lines through Omega are sampled; pairs along each line are integrated exactly.
PerimeterEstimate perimeterK(const RegionSet& set, const BallRegion& omega, const KernelSpec& kernel,
                             const QuadConfig& cfg);

struct ScalingRatio {
  double ratio = 0.0;
  double statError = 0.0;
  double expected = 0.0;  // r^{d-s}
};

/// Per_s(rE; rOmega) / Per_s(E; Omega) for the fractional kernel; independent seeds for both runs.
ScalingRatio perimeterScalingCheck(const RegionSet& set, const BallRegion& omega, double r, double s,
                                   const QuadConfig& cfg);

struct MinkowskiEstimate {
  double value = 0.0;
  double statError = 0.0;
  bool reliable = true;  // false when h exceeds the set's feature scale
};

/// |{x in Omega : dist(x, ∂E) < h}| / (2h) by Monte Carlo.
MinkowskiEstimate classicalPerimeterMinkowski(const RegionSet& set, const BallRegion& omega, double h,
                                              const QuadConfig& cfg, int samples = 1 << 20);

}  // namespace nlgeom
