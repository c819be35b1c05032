#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "nlgeom/measure.hpp"
#include "nlgeom/sets.hpp"
#include "shape_detail.hpp"

namespace nlgeom {

namespace detail {

namespace {

using CellKey = std::uint64_t;
using Cell = std::array<long long, kMaxDim>;

Cell cellOf(const Point& x, double cell) {
  Cell c{};
  for (int i = 0; i < x.dim(); ++i) c[i] = static_cast<long long>(std::floor(x[i] / cell));
  return c;
}

// Distinct cells may collide; lookups always re-check geometry, so a
// collision only adds candidates.
CellKey keyOf(const Cell& c, int dim) {
  std::uint64_t h = 0x51ed270b1f5a3c9dULL;
  for (int i = 0; i < dim; ++i) h = mix64(h ^ static_cast<std::uint64_t>(c[i]));
  return h;
}

template <class Fn>
void forEachCellInBox(const Cell& lo, const Cell& hi, int dim, Fn&& fn) {
  Cell cur = lo;
  while (true) {
    fn(cur);
    int i = 0;
    for (; i < dim; ++i) {
      if (++cur[i] <= hi[i]) break;
      cur[i] = lo[i];
    }
    if (i == dim) return;
  }
}

Membership fromValue(double v) {
  if (v < 0.0) return Membership::Inside;
  if (v > 0.0) return Membership::Outside;
  return Membership::Boundary;
}

class BallUnionShape final : public Shape {
 public:
  BallUnionShape(std::vector<Point> centers, std::vector<double> radii, Point anchor)
      : centers_(std::move(centers)), radii_(std::move(radii)), anchor_(std::move(anchor)) {
    dim_ = centers_.front().dim();
    maxR_ = *std::max_element(radii_.begin(), radii_.end());
    minR_ = *std::min_element(radii_.begin(), radii_.end());
    if (!(minR_ > 0.0)) throw std::invalid_argument("ballUnion: radii must be positive");
    cell_ = 4.0 * maxR_;
    for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
      if (centers_[i].dim() != dim_) throw std::invalid_argument("ballUnion: dimension mismatch");
      centerGrid_[keyOf(cellOf(centers_[i], cell_), dim_)].push_back(i);
      Point lo = centers_[i], hi = centers_[i];
      for (int k = 0; k < dim_; ++k) {
        lo[k] -= radii_[i];
        hi[k] += radii_[i];
      }
      forEachCellInBox(cellOf(lo, cell_), cellOf(hi, cell_), dim_,
                       [&](const Cell& c) { pointGrid_[keyOf(c, dim_)].push_back(i); });
    }
    Point mean(dim_);
    for (const Point& c : centers_) mean += c;
    bc_ = mean / static_cast<double>(centers_.size());
    for (const Point& c : centers_) bR_ = std::max(bR_, distance(c, bc_));
    bR_ += maxR_;
    // Coarse cells hold about 8 centres on average; rays walk them.
    const double perCell = ballVolume(dim_, bR_) * 8.0 / static_cast<double>(centers_.size());
    coarse_ = std::max(cell_, std::pow(perCell, 1.0 / dim_));
    for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
      coarseGrid_[keyOf(cellOf(centers_[i], coarse_), dim_)].push_back(i);
    }
    for (auto& [key, ids] : pointGrid_) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
      forEachNear(centers_[i], radii_[i] + maxR_, [&](int j) {
        if (j != i && distance(centers_[i], centers_[j]) < radii_[i] + radii_[j]) {
          throw std::invalid_argument("ballUnion: balls " + std::to_string(i) + " and " + std::to_string(j) +
                                      " overlap");
        }
      });
    }
  }

  int dim() const override { return dim_; }

  Membership membership(const Point& x) const override {
    const auto it = pointGrid_.find(keyOf(cellOf(x, cell_), dim_));
    if (it == pointGrid_.end()) return Membership::Outside;
    Membership out = Membership::Outside;
    for (int i : it->second) {
      const Membership m = fromValue(norm2(x - centers_[i]) - radii_[i] * radii_[i]);
      if (m == Membership::Inside) return m;
      if (m == Membership::Boundary) out = m;
    }
    return out;
  }

  double sign(const Point& x) const override {
    double best = cell_ - maxR_;
    forEachNear(x, cell_, [&](int i) { best = std::min(best, distance(x, centers_[i]) - radii_[i]); });
    return best;
  }

  Membership localMembership(const Point& a, const Point& h) const override {
    const Point y = a + h;
    const auto it = pointGrid_.find(keyOf(cellOf(y, cell_), dim_));
    if (it == pointGrid_.end()) return Membership::Outside;
    Membership out = Membership::Outside;
    for (int i : it->second) {
      const Point w = a - centers_[i];
      const double r = radii_[i];
      double v;
      if (std::abs(norm(w) - r) <= 1e-9 * r) {
        v = 2.0 * dot(h, w) + norm2(h);
      } else {
        v = norm2(y - centers_[i]) - r * r;
      }
      const Membership m = fromValue(v);
      if (m == Membership::Inside) return m;
      if (m == Membership::Boundary) out = m;
    }
    return out;
  }

  Chord chord(const Point& o, const Point& u, double tmin, double tmax) const override {
    std::vector<std::pair<double, double>> ivs;
    auto test = [&](int i) {
      double t1 = 0.0, t2 = 0.0;
      if (!sphereRoots(o, u, centers_[i], radii_[i], t1, t2)) return;
      if (t2 <= tmin || t1 >= tmax) return;
      ivs.emplace_back(t1, t2);
    };
    double b1 = 0.0, b2 = 0.0;
    if (!sphereRoots(o, u, bc_, bR_, b1, b2)) return chordFromIntervals({}, tmin, tmax);
    const double lo = std::max(tmin, b1), hi = std::min(tmax, b2);
    if (!(hi > lo)) return chordFromIntervals({}, tmin, tmax);
    const double steps = std::ceil((hi - lo) / coarse_);
    if (steps * std::pow(3.0, dim_) * 8.0 >= static_cast<double>(centers_.size())) {
      for (int i = 0; i < static_cast<int>(centers_.size()); ++i) test(i);
      return chordFromIntervals(std::move(ivs), tmin, tmax);
    }
    // A ball meeting the piece [t, t + step] has its centre within step/2 + maxR of the midpoint.
    std::vector<int> ids;
    const int n = static_cast<int>(steps);
    const double step = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      const Point mid = o + (lo + (k + 0.5) * step) * u;
      const double reach = 0.5 * step + maxR_;
      Point a = mid, b = mid;
      for (int j = 0; j < dim_; ++j) {
        a[j] -= reach;
        b[j] += reach;
      }
      forEachCellInBox(cellOf(a, coarse_), cellOf(b, coarse_), dim_, [&](const Cell& c) {
        const auto it = coarseGrid_.find(keyOf(c, dim_));
        if (it != coarseGrid_.end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
      });
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int i : ids) test(i);
    return chordFromIntervals(std::move(ivs), tmin, tmax);
  }

  std::optional<double> volumeInBall(const Point& c, double r) const override {
    double vol = 0.0;
    forEachNear(c, r + maxR_, [&](int i) { vol += lensVolume(dim_, radii_[i], r, distance(c, centers_[i])); });
    return vol;
  }

  std::optional<bool> meetsBall(const Point& c, double r) const override {
    bool meets = false;
    forEachNear(c, r + maxR_, [&](int i) {
      if (distance(c, centers_[i]) < (r + radii_[i]) * (1.0 - 1e-12)) meets = true;
    });
    return meets;
  }

  double featureScale() const override { return minR_; }
  bool signIsDistance() const override { return false; }
  Point anchor() const override { return anchor_; }

  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& w) const override {
    std::vector<int> near;
    forEachNear(w.center, w.radius + maxR_, [&](int i) {
      if (distance(w.center, centers_[i]) < w.radius + radii_[i]) near.push_back(i);
    });
    if (near.empty()) return std::nullopt;
    std::sort(near.begin(), near.end());
    for (int tries = 0; tries < 256; ++tries) {
      const int i = near[rng.index(static_cast<int>(near.size()))];
      const Point p = centers_[i] + radii_[i] * randomDirection(rng, dim_);
      if (distance(p, w.center) <= w.radius) return p;
    }
    return std::nullopt;
  }

 private:
  // Calls fn(i) once for every ball whose centre lies within `reach` of x
  // (and possibly a few more).
  template <class Fn>
  void forEachNear(const Point& x, double reach, Fn&& fn) const {
    const double cellsAcross = 2.0 * reach / cell_ + 1.0;
    if (std::pow(cellsAcross, dim_) > static_cast<double>(centers_.size())) {
      for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
        if (distance(x, centers_[i]) <= reach) fn(i);
      }
      return;
    }
    Point lo = x, hi = x;
    for (int k = 0; k < dim_; ++k) {
      lo[k] -= reach;
      hi[k] += reach;
    }
    forEachCellInBox(cellOf(lo, cell_), cellOf(hi, cell_), dim_, [&](const Cell& c) {
      const auto it = centerGrid_.find(keyOf(c, dim_));
      if (it == centerGrid_.end()) return;
      for (int i : it->second) {
        if (cellOf(centers_[i], cell_) != c) continue;
        if (distance(x, centers_[i]) <= reach) fn(i);
      }
    });
  }

  int dim_ = 0;
  std::vector<Point> centers_;
  std::vector<double> radii_;
  Point anchor_;
  double maxR_ = 0.0, minR_ = 0.0, cell_ = 0.0;
  Point bc_;
  double bR_ = 0.0, coarse_ = 0.0;
  std::unordered_map<CellKey, std::vector<int>> coarseGrid_;
  std::unordered_map<CellKey, std::vector<int>> pointGrid_;
  std::unordered_map<CellKey, std::vector<int>> centerGrid_;
};

}  // namespace

std::shared_ptr<const Shape> makeBallUnionShape(std::vector<Point> centers, std::vector<double> radii,
                                                Point anchor) {
  return std::make_shared<BallUnionShape>(std::move(centers), std::move(radii), std::move(anchor));
}

}  // namespace detail

RegionSet sparseDust(const SparseDustParams& p) {
  if (p.dim < 1 || p.dim > kMaxDim) throw std::invalid_argument("sparseDust: bad dimension");
  if (!(p.target > 0.0 && p.target < 1.0)) throw std::invalid_argument("sparseDust: target must lie in (0, 1)");
  if (!(p.scale > 0.0) || !(p.extent > p.scale)) {
    throw std::invalid_argument("sparseDust: need 0 < scale < extent");
  }
  if (p.candidates < 1) throw std::invalid_argument("sparseDust: candidates must be >= 1");
  const int d = p.dim;
  const Point center = p.center.dim() == 0 ? Point(d) : p.center;
  if (center.dim() != d) throw std::invalid_argument("sparseDust: center dimension mismatch");

  // With this radius a level-r ball may hold target*(r/rho)^d grains, i.e. 4 at r = scale.
  const double rho = p.scale * std::pow(p.target / 4.0, 1.0 / d);
  std::vector<double> levels;
  for (double r = p.scale;; r *= 2.0) {
    levels.push_back(r);
    if (r >= 2.0 * p.extent) break;
  }
  std::vector<double> budget(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) budget[j] = p.target * std::pow(levels[j] / rho, d);

  std::vector<Point> grains{center + rho * Point::unit(d, 0)};
  Rng rng(deriveSeed(p.seed, 0xd057));
  std::vector<int> counts(levels.size());
  for (int k = 0; k < p.candidates; ++k) {
    const Point c = uniformInBall(rng, center, p.extent - rho);
    std::fill(counts.begin(), counts.end(), 1);
    bool ok = true;
    for (const Point& g : grains) {
      const double dist = distance(c, g);
      if (dist <= 2.0 * rho * (1.0 + 1e-9)) {
        ok = false;
        break;
      }
      for (std::size_t j = 0; j < levels.size(); ++j) {
        if (dist <= 2.0 * levels[j] + 2.0 * rho) ++counts[j];
      }
    }
    for (std::size_t j = 0; ok && j < levels.size(); ++j) ok = counts[j] <= budget[j];
    if (ok) grains.push_back(c);
  }

  nlohmann::json params = {{"seed", p.seed},
                           {"target", p.target},
                           {"scale", p.scale},
                           {"extent", p.extent},
                           {"center", detail::pointToJson(center)},
                           {"candidates", p.candidates},
                           {"grains", grains.size()},
                           {"grainRadius", rho}};
  std::vector<double> radii(grains.size(), rho);
  auto shape = detail::makeBallUnionShape(std::move(grains), std::move(radii), center);
  return RegionSet(std::move(shape), SetDescriptor{"sparseDust", std::move(params)});
}

}  // namespace nlgeom
