#include "nlgeom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlgeom/rng.hpp"

namespace nlgeom {

namespace {

constexpr int kRangeGrid = 4096;

// Golden-section search for an extremum of f on [a, b]; sgn = +1 for max, -1 for min.
template <class F>
double refineExtremum(F&& f, double a, double b, double sgn) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = sgn * f(c), fd = sgn * f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sgn * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sgn * f(d);
    }
  }
  return sgn * std::max({fc, fd, sgn * f(a), sgn * f(b)});
}

}  // namespace

std::string kindName(KernelKind kind) {
  switch (kind) {
    case KernelKind::Fractional:
      return "fractional";
    case KernelKind::Anisotropic:
      return "anisotropic";
    case KernelKind::Perturbed:
      return "perturbed";
  }
  return "unknown";
}

KernelSpec::KernelSpec(int dim, double s, KernelKind kind, std::vector<double> cosine)
    : dim_(dim), s_(s), kind_(kind), cosine_(std::move(cosine)) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("kernel: dimension out of range");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel: s must lie in (0, 1), got " + std::to_string(s));
  if (cosine_.empty()) throw std::invalid_argument("kernel: empty profile");
  for (double a : cosine_) {
    if (!std::isfinite(a)) throw std::invalid_argument("kernel: non-finite profile coefficient");
  }
  while (cosine_.size() > 1 && cosine_.back() == 0.0) cosine_.pop_back();

  double scale = 0.0;
  for (double a : cosine_) scale = std::max(scale, std::abs(a));
  Rng rng(0x0dd5eedULL);
  for (int i = 0; i < 1024; ++i) {
    const double t = rng.uniform(0.0, std::numbers::pi);
    const double reflected = dim_ == 2 ? t + std::numbers::pi : std::numbers::pi - t;
    if (std::abs(profileAtAngle(t) - profileAtAngle(reflected)) > 1e-12 * scale) {
      throw std::invalid_argument("kernel: profile has an odd component (K(y) != K(-y))");
    }
  }

  auto f = [this](double t) { return profileAtAngle(t); };
  const double h = std::numbers::pi / kRangeGrid;
  double lo = f(0.0), hi = lo;
  if (dim_ == 1) {
    lo = hi = f(0.0);
  } else {
    std::vector<double> v(kRangeGrid + 1);
    for (int i = 0; i <= kRangeGrid; ++i) v[i] = f(i * h);
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    for (int i = 0; i <= kRangeGrid; ++i) {
      const double a = std::max(0.0, (i - 1) * h), b = std::min(std::numbers::pi, (i + 1) * h);
      const double left = i > 0 ? v[i - 1] : v[i + 1];
      const double right = i < kRangeGrid ? v[i + 1] : v[i - 1];
      if (v[i] <= left && v[i] <= right) lo = std::min(lo, refineExtremum(f, a, b, -1.0));
      if (v[i] >= left && v[i] >= right) hi = std::max(hi, refineExtremum(f, a, b, 1.0));
    }
  }
  if (!(lo > 0.0)) throw std::invalid_argument("kernel: profile must be positive (min " + std::to_string(lo) + ")");
  lambda_ = lo;
  Lambda_ = hi;
}

double KernelSpec::profileAtAngle(double theta) const {
  double acc = cosine_[0];
  for (std::size_t k = 1; k < cosine_.size(); ++k) acc += cosine_[k] * std::cos(k * theta);
  return acc;
}

// Only even harmonics survive the constructor, so the profile is evaluated
// through the doubled angle, which is exactly invariant under y -> -y.
double KernelSpec::profile(const Point& y) const {
  if (cosine_.size() == 1) return cosine_[0];
  double twice = 0.0;
  if (dim_ == 2) {
    twice = std::atan2(2.0 * y[0] * y[1], y[0] * y[0] - y[1] * y[1]);
  } else if (dim_ > 2) {
    const double c2 = y[0] * y[0] / norm2(y);
    twice = std::acos(std::clamp(2.0 * c2 - 1.0, -1.0, 1.0));
  }
  double acc = cosine_[0];
  for (std::size_t k = 2; k < cosine_.size(); k += 2) acc += cosine_[k] * std::cos(0.5 * k * twice);
  return acc;
}

double KernelSpec::evaluate(const Point& y) const {
  return profile(y) * std::pow(norm2(y), -0.5 * (dim_ + s_));
}

nlohmann::json KernelSpec::toJson() const {
  return {{"kind", kindName(kind_)}, {"s", s_}, {"dim", dim_}, {"profile", {{"cos", cosine_}}},
          {"lambda", lambda_}, {"Lambda", Lambda_}};
}

KernelSpec fractionalKernel(int dim, double s) { return KernelSpec(dim, s, KernelKind::Fractional, {1.0}); }

KernelSpec anisotropicKernel(int dim, double s, std::vector<double> cosine) {
  return KernelSpec(dim, s, KernelKind::Anisotropic, std::move(cosine));
}

KernelSpec perturbedKernel(int dim, double s, double epsilon, int mode) {
  if (mode < 0 || mode % 2 != 0) throw std::invalid_argument("perturbedKernel: mode must be even");
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("perturbedKernel: need |epsilon| < 1");
  std::vector<double> c(mode + 1, 0.0);
  c[0] = 1.0;
  c[mode] += epsilon;
  return KernelSpec(dim, s, KernelKind::Perturbed, std::move(c));
}

KernelSpec kernelFromJson(const nlohmann::json& j, int dim) {
  try {
    const std::string kind = j.value("kind", "fractional");
    if (!j.contains("s")) throw std::invalid_argument("kernel json: missing 's'");
    const double s = j.at("s").get<double>();
    if (j.contains("dim") && j.at("dim").get<int>() != dim) {
      throw std::invalid_argument("kernel json: dim " + std::to_string(j.at("dim").get<int>()) +
                                  " does not match scene dim " + std::to_string(dim));
    }
    if (kind == "fractional") return fractionalKernel(dim, s);
    if (kind == "perturbed" && j.contains("epsilon")) {
      return perturbedKernel(dim, s, j.at("epsilon").get<double>(), j.value("mode", 2));
    }
    if (kind == "anisotropic" || kind == "perturbed") {
      if (!j.contains("profile") || !j.at("profile").contains("cos")) {
        throw std::invalid_argument("kernel json: '" + kind + "' needs profile.cos coefficients");
      }
      auto c = j.at("profile").at("cos").get<std::vector<double>>();
      return KernelSpec(dim, s, kind == "anisotropic" ? KernelKind::Anisotropic : KernelKind::Perturbed,
                        std::move(c));
    }
    throw std::invalid_argument("kernel json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("kernel json: ") + e.what());
  }
}

}  // namespace nlgeom
