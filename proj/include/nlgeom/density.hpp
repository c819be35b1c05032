#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlgeom/constants.hpp"
#include "nlgeom/curvature.hpp"
#include "nlgeom/kernels.hpp"
#include "nlgeom/parallel.hpp"
#include "nlgeom/quad.hpp"
#include "nlgeom/sets.hpp"

namespace nlgeom {

enum class CheckVerdict { Pass, Fail, Inconclusive, NotApplicable };

std::string checkVerdictName(CheckVerdict v);

/// Worst verdict first: Fail, then Inconclusive/NotApplicable, then Pass.
CheckVerdict combineVerdicts(const std::vector<CheckVerdict>& verdicts);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct DensityReport {
  Point center;
  std::vector<double> radii;
  std::vector<Estimate> fractions;
  std::vector<Estimate> boundaryFractions;
  std::optional<double> target;
  std::vector<bool> passes;  // fraction >= target - 3 sigma; empty without a target

  bool allPass() const;
  nlohmann::json toJson() const;
};

/// Volume fraction |E ∩ B_r|/|B_r| per radius (exact when the shape provides it, else Monte Carlo).
DensityReport densityProfile(const RegionSet& set, const Point& center, const std::vector<double>& radii,
                             const QuadConfig& cfg, std::optional<double> target = std::nullopt);

/// Fraction with error estimate; exact volumes report error 0.
VolumeFraction densityAt(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                         std::uint64_t stream = 0);

struct SparseSetReport {
  double alpha = 0.0;
  double R = 0.0;
  double gridStep = 0.0;
  double measureDalpha = 0.0;
  double halfBallMeasure = 0.0;  // ½|B_{R/4}|
  double gridError = 0.0;        // √d h |∂B_{R/4}|
  long long gridPoints = 0;      // grid points in B_{R/4}
  long long sparsePoints = 0;
  std::vector<double> radii;     // dyadic radii tested at every point

  nlohmann::json toJson() const;
};

/// Grid count of D_α ∩ B_{R/4}(center): points outside E with |E ∩ B_r(x)| ≤ (α/2^d)|B_r|
/// for every dyadic r = R/2, R/4, ... down to the grid step.
SparseSetReport sparsePointMeasure(const RegionSet& set, double R, double alpha, double gridStep,
                                   const QuadConfig& cfg, const Point& center = Point());

/// Same count with a plain serial loop and no early exits.
SparseSetReport sparsePointMeasureReference(const RegionSet& set, double R, double alpha, double gridStep,
                                            const QuadConfig& cfg, const Point& center = Point());

struct RearrangementResult {
  double lhs = 0.0;  // ∫_{Ω∖E} |x-y|^{-d-s}
  double lhsError = 0.0;
  double rhs = 0.0;  // ∫_{Ω∖B_ρ(x)} |x-y|^{-d-s}
  double rhsError = 0.0;
  double rho = 0.0;
  double rhoError = 0.0;
  CheckVerdict verdict = CheckVerdict::Inconclusive;

  nlohmann::json toJson() const;
};

/// Compares the kernel mass of Ω∖E seen from x with that of Ω∖B_ρ(x), |Ω ∩ B_ρ(x)| = |Ω ∩ E|.
RearrangementResult rearrangementCheck(const BallRegion& omega, const RegionSet& set, const Point& x, double s,
                                       const QuadConfig& cfg);

struct ThresholdResult {
  CheckVerdict verdict = CheckVerdict::NotApplicable;
  Estimate density;        // |E ∩ B_{2r}(center)| / |B_{2r}|
  double densityBound = 0.0;
  double threshold = 0.0;  // (M+1) r^{-s}
  PvEstimate curvature;
  std::string reason;

  nlohmann::json toJson() const;
};

ThresholdResult sparseCurvatureThreshold(const RegionSet& set, const KernelSpec& kernel, const TouchingBall& ball,
                                         const ConstantLedger& ledger, const QuadConfig& cfg);

struct ShellCheckResult {
  CheckVerdict verdict = CheckVerdict::NotApplicable;
  Estimate density;
  double densityBound = 0.0;
  double bound = 0.0;  // Cshell r^{-s}
  TruncatedIntegral integral;
  std::string reason;

  nlohmann::json toJson() const;
};

/// ∫_{B_r(x)∖B_{r/2}(x)} χ̃_E K against Cshell r^{-s} when |E ∩ B_r(x)| ≤ γ|B_r|.
ShellCheckResult shellLowerBoundCheck(const RegionSet& set, const KernelSpec& kernel, const Point& x, double r,
                                      const ConstantLedger& ledger, const QuadConfig& cfg);

struct BlowupFit {
  CheckVerdict verdict = CheckVerdict::NotApplicable;
  std::vector<double> radii;
  std::vector<TruncatedIntegral> values;
  std::vector<double> envelope;
  std::vector<Estimate> densities;
  double slope = 0.0;           // least-squares d log(value) / d log(r)
  bool slopeWithin10 = false;   // |slope + s| ≤ 0.1 s
  std::optional<double> firstFailingScale;
  std::string reason;

  nlohmann::json toJson() const;
};

/// Truncated integrals at r0 2^{-j} down to rMin, fitted against r^{-s} and the shell envelope.
BlowupFit blowupScan(const RegionSet& set, const KernelSpec& kernel, const Point& x, double r0, double rMin,
                     const ConstantLedger& ledger, const QuadConfig& cfg);

struct ViscosityEntry {
  Point point;
  bool constrained = false;  // an exterior ball was found
  double ballRadius = 0.0;
  PvEstimate curvature;
  bool violation = false;
};

struct ViscosityReport {
  double bound = 0.0;
  int sampled = 0;
  int unconstrained = 0;
  int evaluated = 0;
  int inconclusive = 0;
  int violations = 0;
  double maxValue = 0.0;  // over Converged evaluations
  std::vector<ViscosityEntry> entries;

  nlohmann::json toJson() const;
};

struct ViscosityOptions {
  double maxBallRadius = 0.0;  // 0: half the window radius
  std::uint64_t seed = 1;
};

/// Boundary points of E in Ω tested against curv ≤ bound through exterior touching balls.
ViscosityReport viscositySubsolutionScan(const RegionSet& set, const KernelSpec& kernel, const BallRegion& omega,
                                         double bound, int nPoints, const QuadConfig& cfg,
                                         const ViscosityOptions& options = {});

struct IdentityCheck {
  Estimate lhs;  // ∫_{B_r} |χ_E - avg| by Monte Carlo
  double rhs = 0.0;  // 2|E∩B_r||B_r∖E|/|B_r|
  double rhsError = 0.0;
  bool holds = false;  // |lhs - rhs| within 3 sigma
};

IdentityCheck averagingIdentity(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                                std::uint64_t stream = 0);

struct SBEntry {
  double r = 0.0;
  Estimate identityLhs;  // ∫_{B_r} |χ_E - avg|
  double identityRhs = 0.0;  // 2|E∩B_r||B_r∖E|/|B_r|
  double identityRhsError = 0.0;
  bool identityHolds = false;
  Estimate perimeter;    // Per_α(E; B_r), or the lower bound Per_α(E; B_perimeterRadius)
  double perimeterRadius = 0.0;
  double ballPerimeter = 0.0;  // Per_α(B_r)
  bool inequalityHolds = false;
};

struct SBReport {
  double alpha = 0.0;
  double delta = 0.0;
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  std::vector<SBEntry> entries;

  nlohmann::json toJson() const;
};

/// Per_α(E; B_r) ≥ δ Per_α(B_r) around the origin plus the averaging identity (α = 1 uses Minkowski).
SBReport fractionalSBCheck(const RegionSet& set, const std::vector<double>& radii, double alpha, double delta,
                           const QuadConfig& cfg);

}  // namespace nlgeom
