#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "nlgeom/kernels.hpp"
#include "nlgeom/parallel.hpp"
#include "nlgeom/point.hpp"
#include "nlgeom/sets.hpp"

namespace nlgeom {

struct QuadConfig {
  double eps0 = 0.5;
  int kMax = 12;
  double outerRadius = 64.0;
  int samplesPerShell = 4096;
  int replicates = 8;
  int volumeSamples = 16384;
  std::uint64_t seed = 1;
  double tolAbs = 1e-6;
  double tolRel = 1e-2;
  Exec exec = Exec::Parallel;

  /// eps_k = eps0 * 2^{-k}, k = 0..kMax.
  std::vector<double> epsSchedule() const;
  void validate() const;
  nlohmann::json toJson() const;
  static QuadConfig fromJson(const nlohmann::json& j);
};

struct ShellIntegral {
  double inner = 0.0;
  double outer = 0.0;
  double value = 0.0;
  double statError = 0.0;
};

/// Integrand evaluated at the offset h = y - x from the shell centre.
using OffsetIntegrand = std::function<double(const Point& h)>;

struct ShellOptions {
  double s = 0.5;               // radial importance density r^{-1-s}
  std::uint64_t stream = 0;     // seed stream
  std::uint64_t shellIndex = 0;
  // rayShellIntegrate only: when focusAngle > 0, half of the directions are drawn
  // with elevation |asin(u·focusNormal)| < focusAngle (balance-heuristic weights).
  Point focusNormal;
  double focusAngle = 0.0;
};

/// Stratified Monte Carlo estimate of the integral of f over
/// {inner <= |h| < outer} (outer may be +infinity when inner > 0).
ShellIntegral shellIntegrate(const OffsetIntegrand& f, const Point& x, double inner, double outer,
                             const QuadConfig& cfg, const ShellOptions& options = {});

/// Integrals over consecutive annuli [radii[i], radii[i+1]) as independent tasks.
std::vector<ShellIntegral> integrateShells(const OffsetIntegrand& f, const Point& x,
                                           const std::vector<double>& radii, const QuadConfig& cfg,
                                           double s, std::uint64_t stream);

/// ∫_inner^outer of the radial integrand along direction u, including the Jacobian t^{d-1}.
using RayIntegrand = std::function<double(const Point& u, double inner, double outer)>;

/// Shell integral with directions sampled (stratified) and the radial part done
/// exactly by g. In d = 1 both directions are used and the result is exact.
ShellIntegral rayShellIntegrate(const RayIntegrand& g, int dim, double inner, double outer, const QuadConfig& cfg,
                                const ShellOptions& options = {});

/// Lambda d |B_1| R^{-s} / s, bounding |∫_{|y-x|>R} χ̃_E(y) K(x-y) dy| for any E.
double tailBound(const KernelSpec& kernel, double truncation);

struct VolumeFraction {
  double value = 0.0;
  double error = 0.0;
  double boundaryFraction = 0.0;
  double boundaryError = 0.0;
};

/// Monte Carlo |E ∩ B_r(c)| / |B_r| with Boundary samples reported separately.
VolumeFraction volumeFraction(const RegionSet& set, const Point& center, double r, const QuadConfig& cfg,
                              std::uint64_t stream = 0);

}  // namespace nlgeom
