#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace nlgeom {

inline constexpr int kMaxDim = 8;

/// Fixed-capacity coordinate vector. Dimension is a runtime value in [1, kMaxDim].
class Point {
 public:
  Point() = default;
  explicit Point(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw std::invalid_argument("Point dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
  }
  Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), x_.begin());
  }
  explicit Point(std::span<const double> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), x_.begin());
  }

  static Point unit(int dim, int axis) {
    Point p(dim);
    p[axis] = 1.0;
    return p;
  }

  int dim() const { return dim_; }
  double operator[](int i) const {
    assert(i >= 0 && i < dim_);
    return x_[i];
  }
  double& operator[](int i) {
    assert(i >= 0 && i < dim_);
    return x_[i];
  }
  std::span<const double> coords() const { return {x_.data(), static_cast<std::size_t>(dim_)}; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i];
    return *this;
  }
  Point& operator*=(double a) {
    for (int i = 0; i < dim_; ++i) x_[i] *= a;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator-(Point a) { return a *= -1.0; }
  friend Point operator*(Point a, double k) { return a *= k; }
  friend Point operator*(double k, Point a) { return a *= k; }
  friend Point operator/(Point a, double k) { return a *= 1.0 / k; }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.x_[i] != b.x_[i]) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> x_{};
};

inline double dot(const Point& a, const Point& b) {
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

inline bool isFinite(const Point& a) {
  for (int i = 0; i < a.dim(); ++i)
    if (!std::isfinite(a[i])) return false;
  return a.dim() > 0;
}

inline Point normalized(const Point& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  return a / n;
}

/// Reflection of y through the point x, i.e. 2x - y.
inline Point reflectThrough(const Point& x, const Point& y) { return 2.0 * x - y; }

std::string formatPoint(const Point& p);

}  // namespace nlgeom
