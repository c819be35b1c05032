#include "nlgeom/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nlgeom/measure.hpp"
#include "shape_detail.hpp"

namespace nlgeom {

namespace detail {

double belowPlaneVolume(int dim, double radius, double t) {
  if (t <= -radius) return 0.0;
  if (t >= radius) return ballVolume(dim, radius);
  return capVolume(dim, radius, radius + t);
}

Chord chordFromCandidates(const Shape& shape, const Point& origin, const Point& dir, double tmin,
                          double tmax, std::vector<double> candidates) {
  std::erase_if(candidates, [&](double t) { return !(t > tmin && t < tmax); });
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto insideAt = [&](double a, double b) {
    return shape.membership(origin + (0.5 * (a + b)) * dir) == Membership::Inside;
  };
  Chord out;
  bool state = insideAt(tmin, candidates.empty() ? tmax : candidates.front());
  out.startsInside = state;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double next = i + 1 < candidates.size() ? candidates[i + 1] : tmax;
    const bool after = insideAt(candidates[i], next);
    if (after != state) out.crossings.push_back(candidates[i]);
    state = after;
  }
  return out;
}

Chord chordFromIntervals(std::vector<std::pair<double, double>> intervals, double tmin, double tmax) {
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!(iv.second > iv.first)) continue;
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  Chord out;
  for (const auto& [lo, hi] : merged) {
    if (lo <= tmin && tmin < hi) out.startsInside = true;
    if (lo > tmin && lo < tmax) out.crossings.push_back(lo);
    if (hi > tmin && hi < tmax) out.crossings.push_back(hi);
  }
  return out;
}

bool sphereRoots(const Point& origin, const Point& dir, const Point& c, double r, double& t1,
                 double& t2) {
  const Point w = origin - c;
  const double b = dot(dir, w);
  const double cc = norm2(w) - r * r;
  const double disc = b * b - cc;
  if (!(disc > 0.0)) return false;
  const double sq = std::sqrt(disc);
  const double q = -(b + std::copysign(sq, b));
  if (q == 0.0) {
    t1 = -sq;
    t2 = sq;
    return true;
  }
  t1 = q;
  t2 = cc / q;
  if (t1 > t2) std::swap(t1, t2);
  return true;
}

Point pointFromJson(const nlohmann::json& j, int dim, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array of numbers");
  if (static_cast<int>(j.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(dim) +
                                " coordinates, got " + std::to_string(j.size()));
  }
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = j.at(i).get<double>();
  if (!isFinite(p)) throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
  return p;
}

nlohmann::json pointToJson(const Point& p) {
  auto j = nlohmann::json::array();
  for (int i = 0; i < p.dim(); ++i) j.push_back(p[i]);
  return j;
}

}  // namespace detail

using detail::belowPlaneVolume;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Membership fromValue(double v) {
  if (v < 0.0) return Membership::Inside;
  if (v > 0.0) return Membership::Outside;
  return Membership::Boundary;
}

Membership flip(Membership m) {
  if (m == Membership::Inside) return Membership::Outside;
  if (m == Membership::Outside) return Membership::Inside;
  return m;
}

// {x : n·x < b}, n unit.
class HalfSpaceShape final : public Shape {
 public:
  HalfSpaceShape(Point n, double b) : n_(std::move(n)), b_(b) {}
  int dim() const override { return n_.dim(); }
  Membership membership(const Point& x) const override { return fromValue(dot(n_, x) - b_); }
  double sign(const Point& x) const override { return dot(n_, x) - b_; }
  Membership localMembership(const Point&, const Point& h) const override { return fromValue(dot(n_, h)); }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    Chord out;
    const double denom = dot(n_, u);
    const double v0 = dot(n_, o) - b_;
    if (denom == 0.0) {
      out.startsInside = v0 < 0.0;
      return out;
    }
    const double t = -v0 / denom;
    if (t > tmin && t < tmax) {
      out.startsInside = denom > 0.0;
      out.crossings.push_back(t);
    } else if (t <= tmin) {
      out.startsInside = denom < 0.0;
    } else {
      out.startsInside = denom > 0.0;
    }
    return out;
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    return belowPlaneVolume(dim(), r, b_ - dot(n_, c));
  }
  double featureScale() const override { return kInf; }
  Point anchor() const override { return b_ * n_; }
  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& w) const override {
    const double dist = dot(n_, w.center) - b_;
    if (std::abs(dist) > w.radius) return std::nullopt;
    const Point foot = w.center - dist * n_;
    const int d = dim();
    if (d == 1) return foot;
    const double rho = std::sqrt(std::max(0.0, w.radius * w.radius - dist * dist));
    Point t = randomDirection(rng, d);
    t -= dot(t, n_) * n_;
    const double tn = norm(t);
    if (tn == 0.0) return foot;
    return foot + (rho * std::pow(rng.uniform(), 1.0 / (d - 1)) / tn) * t;
  }

 private:
  Point n_;
  double b_;
};

class BallShape final : public Shape {
 public:
  BallShape(Point c, double r) : c_(std::move(c)), r_(r) {}
  int dim() const override { return c_.dim(); }
  Membership membership(const Point& x) const override { return fromValue(norm2(x - c_) - r_ * r_); }
  double sign(const Point& x) const override { return distance(x, c_) - r_; }
  Membership localMembership(const Point& a, const Point& h) const override {
    return fromValue(2.0 * dot(h, a - c_) + norm2(h));
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    Chord out;
    double t1 = 0.0, t2 = 0.0;
    if (!detail::sphereRoots(o, u, c_, r_, t1, t2)) return out;
    out.startsInside = t1 <= tmin && tmin < t2;
    if (t1 > tmin && t1 < tmax) out.crossings.push_back(t1);
    if (t2 > tmin && t2 < tmax) out.crossings.push_back(t2);
    return out;
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    return lensVolume(dim(), r_, r, distance(c, c_));
  }
  double featureScale() const override { return r_; }
  Point anchor() const override { return c_ + r_ * Point::unit(dim(), 0); }
  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& w) const override {
    for (int tries = 0; tries < 64; ++tries) {
      const Point p = c_ + r_ * randomDirection(rng, dim());
      if (distance(p, w.center) <= w.radius) return p;
    }
    return std::nullopt;
  }

 private:
  Point c_;
  double r_;
};

// {x : lo < x_axis < hi}.
class SlabShape final : public Shape {
 public:
  SlabShape(int dim, double lo, double hi, int axis) : dim_(dim), lo_(lo), hi_(hi), axis_(axis) {}
  int dim() const override { return dim_; }
  Membership membership(const Point& x) const override { return fromValue(sign(x)); }
  double sign(const Point& x) const override { return std::max(lo_ - x[axis_], x[axis_] - hi_); }
  Membership localMembership(const Point& a, const Point& h) const override {
    const double ha = h[axis_];
    if (std::abs(a[axis_] - lo_) <= std::abs(a[axis_] - hi_)) {
      return fromValue(std::max(-ha, lo_ + ha - hi_));
    }
    return fromValue(std::max(lo_ - (hi_ + ha), ha));
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    const double ua = u[axis_];
    if (ua == 0.0) {
      Chord out;
      out.startsInside = sign(o) < 0.0;
      return out;
    }
    double ta = (lo_ - o[axis_]) / ua;
    double tb = (hi_ - o[axis_]) / ua;
    if (ta > tb) std::swap(ta, tb);
    return detail::chordFromIntervals({{ta, tb}}, tmin, tmax);
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    return belowPlaneVolume(dim_, r, hi_ - c[axis_]) - belowPlaneVolume(dim_, r, lo_ - c[axis_]);
  }
  double featureScale() const override { return hi_ - lo_; }
  Point anchor() const override { return lo_ * Point::unit(dim_, axis_); }

 private:
  int dim_;
  double lo_, hi_;
  int axis_;
};

// Union of (2kδ, (2k+1)δ) in coordinate `axis`.
class PeriodicSlabShape final : public Shape {
 public:
  PeriodicSlabShape(int dim, double delta, int axis) : dim_(dim), delta_(delta), axis_(axis) {}
  int dim() const override { return dim_; }
  Membership membership(const Point& x) const override {
    const double xa = x[axis_];
    const double k = std::floor(xa / delta_);
    if (xa == k * delta_ || xa == (k + 1.0) * delta_) return Membership::Boundary;
    return isEven(k) ? Membership::Inside : Membership::Outside;
  }
  double sign(const Point& x) const override {
    const double xa = x[axis_];
    const double k = std::floor(xa / delta_);
    const double m = std::clamp(xa - k * delta_, 0.0, delta_);
    const double dist = std::min(m, delta_ - m);
    if (dist == 0.0) return 0.0;
    return isEven(k) ? -dist : dist;
  }
  Membership localMembership(const Point& a, const Point& h) const override {
    const double plane = std::round(a[axis_] / delta_);
    const double ha = h[axis_];
    const double k = std::floor(ha / delta_);
    if (ha == k * delta_) return Membership::Boundary;
    return isEven(plane + k) ? Membership::Inside : Membership::Outside;
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    Chord out;
    const double ua = u[axis_];
    if (ua == 0.0) {
      out.startsInside = membership(o) == Membership::Inside;
      return out;
    }
    const double a0 = o[axis_] + tmin * ua;
    const double a1 = o[axis_] + tmax * ua;
    double k0 = std::floor(a0 / delta_);
    if (a0 == k0 * delta_ && ua < 0.0) k0 -= 1.0;
    out.startsInside = isEven(k0);
    const double lo = std::ceil(std::min(a0, a1) / delta_);
    const double hi = std::floor(std::max(a0, a1) / delta_);
    if (hi - lo > 5e7) throw std::runtime_error("periodicSlab chord: too many crossings in window");
    for (double k = lo; k <= hi; k += 1.0) {
      const double t = (k * delta_ - o[axis_]) / ua;
      if (t > tmin && t < tmax) out.crossings.push_back(t);
    }
    std::sort(out.crossings.begin(), out.crossings.end());
    return out;
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    const double ca = c[axis_];
    const double kLo = std::floor((ca - r) / (2.0 * delta_));
    const double kHi = std::ceil((ca + r) / (2.0 * delta_));
    if (kHi - kLo > 1e6) return std::nullopt;
    double vol = 0.0;
    for (double k = kLo; k <= kHi; k += 1.0) {
      const double lo = 2.0 * k * delta_ - ca;
      const double hi = lo + delta_;
      vol += belowPlaneVolume(dim_, r, hi) - belowPlaneVolume(dim_, r, lo);
    }
    return vol;
  }
  double featureScale() const override { return delta_; }
  Point anchor() const override { return Point(dim_); }

 private:
  static bool isEven(double k) { return std::fmod(k, 2.0) == 0.0; }
  int dim_;
  double delta_;
  int axis_;
};

// {y : angle(y - apex, axis) < theta}.
class ConeShape final : public Shape {
 public:
  ConeShape(Point apex, Point axis, double theta)
      : apex_(std::move(apex)), u_(std::move(axis)), theta_(theta), cos_(std::cos(theta)) {}
  int dim() const override { return apex_.dim(); }
  Membership membership(const Point& x) const override {
    const Point w = x - apex_;
    const double n = norm(w);
    if (n == 0.0) return Membership::Boundary;
    return fromValue(n * cos_ - dot(w, u_));
  }
  double sign(const Point& x) const override {
    const Point w = x - apex_;
    const double n = norm(w);
    if (n == 0.0) return 0.0;
    const double along = dot(w, u_);
    const double perp = std::sqrt(std::max(0.0, n * n - along * along));
    const double gap = std::atan2(perp, along) - theta_;
    if (gap > std::numbers::pi / 2) return n;
    if (gap < -std::numbers::pi / 2) return -n;
    return n * std::sin(gap);
  }
  Membership localMembership(const Point& a, const Point& h) const override {
    const Point w = a - apex_;
    const double nw = norm(w);
    const double nwh = norm(w + h);
    if (nw + nwh == 0.0) return Membership::Boundary;
    const double f = dot(h, u_) - cos_ * (2.0 * dot(h, w) + norm2(h)) / (nwh + nw);
    return fromValue(-f);
  }
  Chord chord(const Point& o, const Point& v, double tmin, double tmax) const override {
    const Point w0 = o - apex_;
    const double c2 = cos_ * cos_;
    const double vu = dot(v, u_);
    const double wu = dot(w0, u_);
    const double A = vu * vu - c2;
    const double B = 2.0 * (wu * vu - c2 * dot(w0, v));
    const double C = wu * wu - c2 * norm2(w0);
    std::vector<double> cand;
    if (A == 0.0) {
      if (B != 0.0) cand.push_back(-C / B);
    } else {
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (B + std::copysign(sq, B));
        if (q != 0.0) {
          cand.push_back(q / A);
          cand.push_back(C / q);
        } else {
          cand.push_back(0.0);
        }
      }
    }
    // Closest approach to the apex, where the state may change without a root.
    cand.push_back(-dot(w0, v));
    return detail::chordFromCandidates(*this, o, v, tmin, tmax, std::move(cand));
  }
  double featureScale() const override { return kInf; }
  Point anchor() const override {
    const int d = dim();
    if (d == 1) return apex_;
    Point perp = Point::unit(d, 0);
    if (std::abs(u_[0]) > 0.9) perp = Point::unit(d, 1);
    perp = normalized(perp - dot(perp, u_) * u_);
    return apex_ + std::cos(theta_) * u_ + std::sin(theta_) * perp;
  }

 private:
  Point apex_, u_;
  double theta_, cos_;
};

class BoxUnionShape final : public Shape {
 public:
  explicit BoxUnionShape(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
    minSide_ = kInf;
    for (const auto& b : boxes_)
      for (int i = 0; i < dim(); ++i) minSide_ = std::min(minSide_, b.hi[i] - b.lo[i]);
  }
  int dim() const override { return boxes_.front().lo.dim(); }
  Membership membership(const Point& x) const override { return fromValue(sign(x)); }
  double sign(const Point& x) const override {
    double best = kInf;
    for (const auto& b : boxes_) best = std::min(best, boxSign(b, x));
    return best;
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    std::vector<std::pair<double, double>> ivs;
    for (const auto& b : boxes_) {
      double lo = -kInf, hi = kInf;
      bool hit = true;
      for (int i = 0; i < dim() && hit; ++i) {
        if (u[i] == 0.0) {
          hit = o[i] > b.lo[i] && o[i] < b.hi[i];
          continue;
        }
        double ta = (b.lo[i] - o[i]) / u[i];
        double tb = (b.hi[i] - o[i]) / u[i];
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
        hit = lo < hi;
      }
      if (hit) ivs.emplace_back(lo, hi);
    }
    return detail::chordFromIntervals(std::move(ivs), tmin, tmax);
  }
  double featureScale() const override { return minSide_; }
  bool signIsDistance() const override { return false; }
  Point anchor() const override { return boxes_.front().lo; }

 private:
  static double boxSign(const Box& b, const Point& x) {
    double outside2 = 0.0;
    double inside = -kInf;
    for (int i = 0; i < x.dim(); ++i) {
      const double q = std::max(b.lo[i] - x[i], x[i] - b.hi[i]);
      if (q > 0.0) outside2 += q * q;
      inside = std::max(inside, q);
    }
    return outside2 > 0.0 ? std::sqrt(outside2) : inside;
  }
  std::vector<Box> boxes_;
  double minSide_;
};

class ConstShape final : public Shape {
 public:
  ConstShape(int dim, bool full) : dim_(dim), full_(full) {}
  int dim() const override { return dim_; }
  Membership membership(const Point&) const override {
    return full_ ? Membership::Inside : Membership::Outside;
  }
  double sign(const Point&) const override { return full_ ? -kInf : kInf; }
  Chord chord(const Point&, const Point&, double, double) const override {
    Chord out;
    out.startsInside = full_;
    return out;
  }
  std::optional<double> volumeInBall(const Point&, double r) const override {
    return full_ ? ballVolume(dim_, r) : 0.0;
  }
  double featureScale() const override { return kInf; }
  Point anchor() const override { return Point(dim_); }

 private:
  int dim_;
  bool full_;
};

class ComplementShape final : public Shape {
 public:
  explicit ComplementShape(std::shared_ptr<const Shape> inner) : inner_(std::move(inner)) {}
  const std::shared_ptr<const Shape>& inner() const { return inner_; }
  int dim() const override { return inner_->dim(); }
  Membership membership(const Point& x) const override { return flip(inner_->membership(x)); }
  double sign(const Point& x) const override { return -inner_->sign(x); }
  Membership localMembership(const Point& a, const Point& h) const override {
    return flip(inner_->localMembership(a, h));
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    Chord c = inner_->chord(o, u, tmin, tmax);
    c.startsInside = !c.startsInside;
    return c;
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    const auto v = inner_->volumeInBall(c, r);
    if (!v) return std::nullopt;
    return std::max(0.0, ballVolume(dim(), r) - *v);
  }
  double featureScale() const override { return inner_->featureScale(); }
  bool signIsDistance() const override { return inner_->signIsDistance(); }
  Point anchor() const override { return inner_->anchor(); }
  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& w) const override {
    return inner_->sampleBoundary(rng, w);
  }

 private:
  std::shared_ptr<const Shape> inner_;
};

class ScaledShape final : public Shape {
 public:
  ScaledShape(std::shared_ptr<const Shape> inner, double f) : inner_(std::move(inner)), f_(f) {}
  int dim() const override { return inner_->dim(); }
  Membership membership(const Point& x) const override { return inner_->membership(x / f_); }
  double sign(const Point& x) const override { return f_ * inner_->sign(x / f_); }
  Membership localMembership(const Point& a, const Point& h) const override {
    return inner_->localMembership(a / f_, h / f_);
  }
  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    Chord c = inner_->chord(o / f_, u, tmin / f_, tmax / f_);
    for (double& t : c.crossings) t *= f_;
    return c;
  }
  std::optional<double> volumeInBall(const Point& c, double r) const override {
    const auto v = inner_->volumeInBall(c / f_, r / f_);
    if (!v) return std::nullopt;
    return *v * std::pow(f_, dim());
  }
  std::optional<bool> meetsBall(const Point& c, double r) const override {
    return inner_->meetsBall(c / f_, r / f_);
  }
  double featureScale() const override { return f_ * inner_->featureScale(); }
  bool signIsDistance() const override { return inner_->signIsDistance(); }
  Point anchor() const override { return f_ * inner_->anchor(); }
  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& w) const override {
    const auto p = inner_->sampleBoundary(rng, BallRegion{w.center / f_, w.radius / f_});
    if (!p) return std::nullopt;
    return f_ * *p;
  }

 private:
  std::shared_ptr<const Shape> inner_;
  double f_;
};

void requireDim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                                std::to_string(dim));
  }
}

void requireAxis(int dim, int axis) {
  if (axis < 0 || axis >= dim) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " out of range for dimension " +
                                std::to_string(dim));
  }
}

SymmetryTag reflection(SymmetryKind kind, Point normal, double offset, double period = 0.0) {
  SymmetryTag t{kind, std::move(normal), offset, period, Point()};
  t.origin = Point(t.normal.dim());
  return t;
}

}  // namespace

Point reflectAcross(const Point& x, const Point& n, double offset) {
  return x - (2.0 * (dot(n, x) - offset)) * n;
}

RegionSet::RegionSet(std::shared_ptr<const Shape> shape, SetDescriptor descriptor,
                     std::vector<SymmetryTag> symmetries)
    : shape_(std::move(shape)), descriptor_(std::move(descriptor)), symmetries_(std::move(symmetries)) {
  if (!shape_) throw std::invalid_argument("RegionSet: null shape");
}

Membership RegionSet::localMembership(const Point& anchor, const Point& offset) const {
  return shape_->localMembership(anchor, offset);
}

Chord RegionSet::localChord(const Point& anchor, const Point& dir, double tmin, double tmax) const {
  const Chord raw = shape_->chord(anchor, dir, tmin, tmax);
  auto insideAt = [&](double a, double b) {
    return shape_->localMembership(anchor, (0.5 * (a + b)) * dir) == Membership::Inside;
  };
  Chord out;
  const auto& c = raw.crossings;
  bool state = insideAt(tmin, c.empty() ? tmax : c.front());
  out.startsInside = state;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool after = insideAt(c[i], i + 1 < c.size() ? c[i + 1] : tmax);
    if (after != state) out.crossings.push_back(c[i]);
    state = after;
  }
  return out;
}

bool RegionSet::onBoundary(const Point& x) const {
  if (membership(x) == Membership::Boundary) return true;
  const double tol = std::min(1e-10 * (1.0 + norm(x)), 1e-6 * featureScale());
  return std::abs(sign(x)) <= tol;
}

std::optional<Point> RegionSet::sampleBoundary(Rng& rng, const BallRegion& window) const {
  if (auto p = shape_->sampleBoundary(rng, window)) return p;
  const int d = dim();
  for (int tries = 0; tries < 256; ++tries) {
    const Point o = uniformInBall(rng, window.center, window.radius);
    const Point u = randomDirection(rng, d);
    const Chord c = chord(o, u, -2.0 * window.radius, 2.0 * window.radius);
    std::vector<Point> hits;
    for (double t : c.crossings) {
      const Point p = o + t * u;
      if (distance(p, window.center) <= window.radius) hits.push_back(p);
    }
    if (!hits.empty()) return hits[rng.index(static_cast<int>(hits.size()))];
  }
  return std::nullopt;
}

RegionSet RegionSet::complement() const {
  if (auto c = std::dynamic_pointer_cast<const ComplementShape>(shape_); c && descriptor_.name == "complement") {
    const auto& of = descriptor_.params.at("of");
    return RegionSet(c->inner(), SetDescriptor{of.at("name").get<std::string>(), of.at("params")}, symmetries_);
  }
  SetDescriptor desc{"complement", {{"of", {{"name", descriptor_.name}, {"params", descriptor_.params}}}}};
  if (descriptor_.name == "ball") {
    desc = SetDescriptor{"ballComplement", descriptor_.params};
  } else if (descriptor_.name == "ballComplement") {
    return canonicalSet("ball", descriptor_.params, dim());
  } else if (descriptor_.name == "emptySet") {
    return fullSet(dim());
  } else if (descriptor_.name == "fullSet") {
    return emptySet(dim());
  }
  return RegionSet(std::make_shared<ComplementShape>(shape_), std::move(desc), symmetries_);
}

RegionSet RegionSet::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scaled: factor must be positive and finite");
  }
  std::vector<SymmetryTag> tags = symmetries_;
  for (auto& t : tags) {
    t.offset *= factor;
    t.period *= factor;
    t.origin = factor * t.origin;
  }
  SetDescriptor desc{"scaled",
                     {{"factor", factor}, {"of", {{"name", descriptor_.name}, {"params", descriptor_.params}}}}};
  return RegionSet(std::make_shared<ScaledShape>(shape_, factor), std::move(desc), std::move(tags));
}

int tildeChi(const RegionSet& set, const Point& x) {
  switch (set.membership(x)) {
    case Membership::Inside:
      return -1;
    case Membership::Outside:
      return 1;
    case Membership::Boundary:
      return 0;
  }
  return 0;
}

RegionSet halfSpace(const Point& normal, double offset) {
  requireDim(normal.dim());
  const Point n = normalized(normal);
  if (!std::isfinite(offset)) throw std::invalid_argument("halfSpace: non-finite offset");
  std::vector<SymmetryTag> tags{reflection(SymmetryKind::ReflectionSwap, n, offset)};
  SymmetryTag scale{SymmetryKind::ScaleInvariant, n, offset, 0.0, offset * n};
  tags.push_back(scale);
  SetDescriptor desc{"halfSpace", {{"normal", detail::pointToJson(n)}, {"offset", offset}}};
  return RegionSet(std::make_shared<HalfSpaceShape>(n, offset), std::move(desc), std::move(tags));
}

RegionSet ball(const Point& center, double radius) {
  requireDim(center.dim());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball: radius must be positive");
  std::vector<SymmetryTag> tags;
  for (int i = 0; i < center.dim(); ++i) {
    tags.push_back(reflection(SymmetryKind::ReflectionPreserve, Point::unit(center.dim(), i), center[i]));
  }
  SetDescriptor desc{"ball", {{"center", detail::pointToJson(center)}, {"radius", radius}}};
  return RegionSet(std::make_shared<BallShape>(center, radius), std::move(desc), std::move(tags));
}

RegionSet ballComplement(const Point& center, double radius) { return ball(center, radius).complement(); }

RegionSet slab(int dim, double lo, double hi, int axis) {
  requireDim(dim);
  requireAxis(dim, axis);
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("slab: need finite lo < hi");
  }
  std::vector<SymmetryTag> tags{
      reflection(SymmetryKind::ReflectionPreserve, Point::unit(dim, axis), 0.5 * (lo + hi))};
  SetDescriptor desc{"slab", {{"lo", lo}, {"hi", hi}, {"axis", axis}}};
  return RegionSet(std::make_shared<SlabShape>(dim, lo, hi, axis), std::move(desc), std::move(tags));
}

RegionSet periodicSlab(int dim, double delta, int axis) {
  requireDim(dim);
  requireAxis(dim, axis);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("periodicSlab: delta must be > 0");
  const Point e = Point::unit(dim, axis);
  std::vector<SymmetryTag> tags{reflection(SymmetryKind::ReflectionSwap, e, 0.0, delta),
                                reflection(SymmetryKind::ReflectionPreserve, e, 0.5 * delta, delta)};
  SetDescriptor desc{"periodicSlab", {{"delta", delta}, {"axis", axis}}};
  return RegionSet(std::make_shared<PeriodicSlabShape>(dim, delta, axis), std::move(desc), std::move(tags));
}

RegionSet coneSector(const Point& apex, const Point& axis, double halfAngle) {
  requireDim(apex.dim());
  if (axis.dim() != apex.dim()) throw std::invalid_argument("coneSector: apex/axis dimension mismatch");
  if (!(halfAngle > 0.0 && halfAngle < std::numbers::pi)) {
    throw std::invalid_argument("coneSector: halfAngle must lie in (0, pi)");
  }
  const Point u = normalized(axis);
  SymmetryTag scale{SymmetryKind::ScaleInvariant, u, 0.0, 0.0, apex};
  SetDescriptor desc{"coneSector",
                     {{"apex", detail::pointToJson(apex)}, {"axis", detail::pointToJson(u)}, {"halfAngle", halfAngle}}};
  return RegionSet(std::make_shared<ConeShape>(apex, u, halfAngle), std::move(desc), {scale});
}

RegionSet ballUnion(std::vector<Point> centers, std::vector<double> radii) {
  if (centers.empty() || centers.size() != radii.size()) {
    throw std::invalid_argument("ballUnion: need matching, non-empty centers and radii");
  }
  const Point anchor = centers.front() + radii.front() * Point::unit(centers.front().dim(), 0);
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : centers) cj.push_back(detail::pointToJson(c));
  SetDescriptor desc{"ballUnion", {{"centers", cj}, {"radii", radii}}};
  auto shape = detail::makeBallUnionShape(std::move(centers), std::move(radii), anchor);
  return RegionSet(std::move(shape), std::move(desc));
}

RegionSet boxUnion(std::vector<Box> boxes) {
  if (boxes.empty()) throw std::invalid_argument("boxUnion: no boxes");
  const int d = boxes.front().lo.dim();
  requireDim(d);
  nlohmann::json bj = nlohmann::json::array();
  for (const auto& b : boxes) {
    if (b.lo.dim() != d || b.hi.dim() != d) throw std::invalid_argument("boxUnion: dimension mismatch");
    for (int i = 0; i < d; ++i) {
      if (!(b.hi[i] > b.lo[i])) throw std::invalid_argument("boxUnion: empty box");
    }
    bj.push_back({{"lo", detail::pointToJson(b.lo)}, {"hi", detail::pointToJson(b.hi)}});
  }
  SetDescriptor desc{"boxUnion", {{"boxes", bj}}};
  return RegionSet(std::make_shared<BoxUnionShape>(std::move(boxes)), std::move(desc));
}

RegionSet emptySet(int dim) {
  requireDim(dim);
  return RegionSet(std::make_shared<ConstShape>(dim, false), SetDescriptor{"emptySet", nlohmann::json::object()});
}

RegionSet fullSet(int dim) {
  requireDim(dim);
  return RegionSet(std::make_shared<ConstShape>(dim, true), SetDescriptor{"fullSet", nlohmann::json::object()});
}

RegionSet canonicalSet(const std::string& name, const nlohmann::json& params, int dim) {
  requireDim(dim);
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  auto point = [&](const char* key, Point fallback) {
    return p.contains(key) ? detail::pointFromJson(p.at(key), dim, key) : fallback;
  };
  try {
    if (name == "halfSpace") {
      return halfSpace(point("normal", Point::unit(dim, 0)), p.value("offset", 0.0));
    }
    if (name == "ball") return ball(point("center", Point(dim)), p.value("radius", 1.0));
    if (name == "ballComplement") return ballComplement(point("center", Point(dim)), p.value("radius", 1.0));
    if (name == "slab") {
      const int axis = p.value("axis", 0);
      if (p.contains("width")) return slab(dim, 0.0, p.at("width").get<double>(), axis);
      return slab(dim, p.value("lo", 0.0), p.value("hi", 1.0), axis);
    }
    if (name == "periodicSlab") {
      if (!p.contains("delta")) throw std::invalid_argument("periodicSlab: missing 'delta'");
      return periodicSlab(dim, p.at("delta").get<double>(), p.value("axis", 0));
    }
    if (name == "coneSector") {
      if (!p.contains("halfAngle")) throw std::invalid_argument("coneSector: missing 'halfAngle'");
      return coneSector(point("apex", Point(dim)), point("axis", Point::unit(dim, dim - 1)),
                        p.at("halfAngle").get<double>());
    }
    if (name == "sparseDust") {
      for (const char* key : {"seed", "target", "scale"}) {
        if (!p.contains(key)) throw std::invalid_argument(std::string("sparseDust: missing '") + key + "'");
      }
      SparseDustParams dp;
      dp.dim = dim;
      dp.seed = p.at("seed").get<std::uint64_t>();
      dp.target = p.at("target").get<double>();
      dp.scale = p.at("scale").get<double>();
      dp.extent = p.value("extent", 1.0);
      dp.center = point("center", Point(dim));
      dp.candidates = p.value("candidates", 4096);
      return sparseDust(dp);
    }
    if (name == "ballUnion") {
      std::vector<Point> centers;
      for (const auto& c : p.at("centers")) centers.push_back(detail::pointFromJson(c, dim, "centers"));
      return ballUnion(std::move(centers), p.at("radii").get<std::vector<double>>());
    }
    if (name == "boxUnion") {
      std::vector<Box> boxes;
      for (const auto& b : p.at("boxes")) {
        boxes.push_back(Box{detail::pointFromJson(b.at("lo"), dim, "lo"), detail::pointFromJson(b.at("hi"), dim, "hi")});
      }
      return boxUnion(std::move(boxes));
    }
    if (name == "emptySet") return emptySet(dim);
    if (name == "fullSet") return fullSet(dim);
    if (name == "complement") {
      const auto& of = p.at("of");
      return canonicalSet(of.at("name").get<std::string>(), of.value("params", nlohmann::json::object()), dim)
          .complement();
    }
    if (name == "scaled") {
      const auto& of = p.at("of");
      return canonicalSet(of.at("name").get<std::string>(), of.value("params", nlohmann::json::object()), dim)
          .scaled(p.at("factor").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("set '" + name + "': bad parameters: " + e.what());
  }
  throw std::invalid_argument("unknown set name '" + name + "'");
}

RegionSet sceneFromJson(const nlohmann::json& scene) {
  if (!scene.contains("set") || !scene.contains("dim")) {
    throw std::invalid_argument("scene: expected keys 'set' and 'dim'");
  }
  const auto& s = scene.at("set");
  if (!s.contains("name")) throw std::invalid_argument("scene: set has no 'name'");
  return canonicalSet(s.at("name").get<std::string>(), s.value("params", nlohmann::json::object()),
                      scene.at("dim").get<int>());
}

nlohmann::json sceneToJson(const RegionSet& set) {
  return {{"set", {{"name", set.descriptor().name}, {"params", set.descriptor().params}}}, {"dim", set.dim()}};
}

}  // namespace nlgeom
