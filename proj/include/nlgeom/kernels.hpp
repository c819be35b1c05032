#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlgeom/point.hpp"

namespace nlgeom {

enum class KernelKind { Fractional, Anisotropic, Perturbed };

std::string kindName(KernelKind kind);

/// K(y) = profile(y/|y|) |y|^{-d-s} with an even profile given by a cosine
/// series in the polar angle: profile = sum_k a_k cos(k theta). theta is
/// atan2(y_2, y_1) for d = 2 and the angle to e_1 otherwise.
class KernelSpec {
 public:
  KernelSpec(int dim, double s, KernelKind kind, std::vector<double> cosine);

  int dim() const { return dim_; }
  double s() const { return s_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  KernelKind kind() const { return kind_; }
  const std::vector<double>& cosine() const { return cosine_; }
  bool isotropic() const { return cosine_.size() == 1; }

  double evaluate(const Point& y) const;
  /// profile at the direction of y (y need not be normalised).
  double profile(const Point& y) const;
  double profileAtAngle(double theta) const;

  nlohmann::json toJson() const;

 private:
  int dim_;
  double s_;
  KernelKind kind_;
  std::vector<double> cosine_;
  double lambda_ = 1.0, Lambda_ = 1.0;
};

KernelSpec fractionalKernel(int dim, double s);
KernelSpec anisotropicKernel(int dim, double s, std::vector<double> cosine);
/// Fractional kernel times 1 + epsilon cos(mode theta), mode even.
KernelSpec perturbedKernel(int dim, double s, double epsilon, int mode = 2);

/// {"kind": ..., "s": s, "profile": {"cos": [a_0, a_1, ...]}}; `dim` comes from the scene.
KernelSpec kernelFromJson(const nlohmann::json& j, int dim);

}  // namespace nlgeom
