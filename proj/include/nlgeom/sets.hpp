#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlgeom/point.hpp"
#include "nlgeom/rng.hpp"

namespace nlgeom {

enum class Membership { Inside, Outside, Boundary };

/// A closed ball used as a localizer or sampling window.
struct BallRegion {
  Point center;
  double radius = 1.0;
};

/// Crossings of the line origin + t*dir (dir a unit vector) with the boundary,
/// restricted to (tmin, tmax). `startsInside` is the state on (tmin, first crossing).
struct Chord {
  bool startsInside = false;
  std::vector<double> crossings;
};

enum class SymmetryKind {
  ReflectionSwap,      // reflection exchanges E and its complement
  ReflectionPreserve,  // reflection maps E to itself
  ScaleInvariant,      // dilations about `origin` preserve E
};

/// Reflection across {y : normal·y = offset + k*period} for every integer k
/// (only k = 0 when period == 0).
struct SymmetryTag {
  SymmetryKind kind;
  Point normal;
  double offset = 0.0;
  double period = 0.0;
  Point origin;
};

Point reflectAcross(const Point& x, const Point& unitNormal, double offset);

/// Geometry behind a RegionSet. Implementations are immutable and thread-safe.
class Shape {
 public:
  virtual ~Shape() = default;

  virtual int dim() const = 0;
  virtual Membership membership(const Point& x) const = 0;

  /// Negative inside, positive outside, zero on the boundary.
  virtual double sign(const Point& x) const = 0;

  /// Membership of anchor + offset where `anchor` lies on the boundary. Shapes
  /// override this with offset-form formulas that stay exact for tiny offsets.
  virtual Membership localMembership(const Point& anchor, const Point& offset) const {
    return membership(anchor + offset);
  }

  virtual Chord chord(const Point& origin, const Point& dir, double tmin, double tmax) const = 0;

  /// Exact |E ∩ B_r(c)| when available in closed form.
  virtual std::optional<double> volumeInBall(const Point& /*c*/, double /*r*/) const {
    return std::nullopt;
  }

  /// Smallest geometric length scale (curvature radius, slab width, grain radius).
  virtual double featureScale() const = 0;

  /// True when |sign(x)| is the Euclidean distance to the boundary.
  virtual bool signIsDistance() const { return true; }

  /// A canonical boundary point (the contact/reference point of the set).
  virtual Point anchor() const = 0;

  /// Exact test whether E meets the open ball B_r(c), when the shape can decide it.
  virtual std::optional<bool> meetsBall(const Point& /*c*/, double /*r*/) const { return std::nullopt; }

  /// Uniform-ish boundary point inside `window`, if the shape has a direct sampler.
  virtual std::optional<Point> sampleBoundary(Rng& /*rng*/, const BallRegion& /*window*/) const {
    return std::nullopt;
  }
};

struct SetDescriptor {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

/// A Borel set given by an exact membership predicate plus a sign field.
class RegionSet {
 public:
  RegionSet(std::shared_ptr<const Shape> shape, SetDescriptor descriptor,
            std::vector<SymmetryTag> symmetries = {});

  int dim() const { return shape_->dim(); }
  Membership membership(const Point& x) const { return shape_->membership(x); }
  double sign(const Point& x) const { return shape_->sign(x); }
  Membership localMembership(const Point& anchor, const Point& offset) const;
  Chord chord(const Point& origin, const Point& dir, double tmin, double tmax) const {
    return shape_->chord(origin, dir, tmin, tmax);
  }
  /// Chord along anchor + t*dir for an anchor on the boundary; every segment is
  /// reclassified with localMembership so round-off near the anchor cannot flip a state.
  Chord localChord(const Point& anchor, const Point& dir, double tmin, double tmax) const;
  std::optional<double> volumeInBall(const Point& c, double r) const { return shape_->volumeInBall(c, r); }
  double featureScale() const { return shape_->featureScale(); }
  bool signIsDistance() const { return shape_->signIsDistance(); }
  Point anchor() const { return shape_->anchor(); }
  std::optional<bool> meetsBall(const Point& c, double r) const { return shape_->meetsBall(c, r); }

  /// Boundary test tolerant to the round-off of computed boundary points.
  bool onBoundary(const Point& x) const;

  /// Boundary point within `window`; falls back to random chords through the window.
  std::optional<Point> sampleBoundary(Rng& rng, const BallRegion& window) const;

  const SetDescriptor& descriptor() const { return descriptor_; }
  const std::vector<SymmetryTag>& symmetries() const { return symmetries_; }
  const Shape& shape() const { return *shape_; }

  RegionSet complement() const;
  /// The dilation {factor * y : y in E}.
  RegionSet scaled(double factor) const;

 private:
  std::shared_ptr<const Shape> shape_;
  SetDescriptor descriptor_;
  std::vector<SymmetryTag> symmetries_;
};

/// χ̃_E(x): -1 inside, +1 outside, 0 on the boundary.
int tildeChi(const RegionSet& set, const Point& x);

// Canonical library ---------------------------------------------------------

RegionSet halfSpace(const Point& normal, double offset = 0.0);
RegionSet ball(const Point& center, double radius);
RegionSet ballComplement(const Point& center, double radius);
/// {y : lo < y[axis] < hi}.
RegionSet slab(int dim, double lo, double hi, int axis = 0);
/// Alternating slabs (2kδ, (2k+1)δ) in coordinate `axis`.
RegionSet periodicSlab(int dim, double delta, int axis = 0);
/// Open cone {y : angle(y - apex, axis) < halfAngle}.
RegionSet coneSector(const Point& apex, const Point& axis, double halfAngle);

struct SparseDustParams {
  int dim = 2;
  double target = 0.01;   // density budget in every dyadic ball of radius >= scale
  double scale = 1.0 / 256.0;
  std::uint64_t seed = 1;
  double extent = 1.0;    // grains live in B_extent(center)
  Point center;           // defaults to the origin; lies on the first grain's sphere
  int candidates = 4096;
};

/// Finite union of tiny disjoint balls, built greedily under a dyadic density budget.
RegionSet sparseDust(const SparseDustParams& params);

/// Union of disjoint balls (validated).
RegionSet ballUnion(std::vector<Point> centers, std::vector<double> radii);

struct Box {
  Point lo, hi;
};
/// Union of open axis-aligned boxes (overlaps allowed).
RegionSet boxUnion(std::vector<Box> boxes);

RegionSet emptySet(int dim);
RegionSet fullSet(int dim);

/// Builds a canonical set from its name and JSON parameters.
RegionSet canonicalSet(const std::string& name, const nlohmann::json& params, int dim);

/// Scene JSON: {"set": {"name": ..., "params": {...}}, "dim": d}.
RegionSet sceneFromJson(const nlohmann::json& scene);
nlohmann::json sceneToJson(const RegionSet& set);

// Touching balls --------------------------------------------------------------

struct TouchingBall {
  Point center;
  double radius = 0.0;
  Point contact;
};

struct ExteriorBallOptions {
  int searchSamples = 1024;  // per bisection probe
  int finalSamples = 10000;  // final acceptance check
  int bisectionSteps = 40;
  std::uint64_t seed = 0x7a11ba11ULL;
};

struct ExteriorBallResult {
  std::optional<TouchingBall> ball;
  std::string reason;  // empty on success
};

/// Searches along the outward normal of the sign field for the largest
/// verified exterior ball of radius <= maxRadius touching E at x.
ExteriorBallResult findExteriorBall(const RegionSet& set, const Point& x, double maxRadius,
                                    const ExteriorBallOptions& options = {});

/// Check that the open ball misses E: exact when the shape supports it,
/// otherwise rejection sampling over nested tangent balls so the
/// neighbourhood of the contact is covered.
bool verifyExteriorBall(const RegionSet& set, const TouchingBall& ball, int samples,
                        std::uint64_t seed);

/// Outward unit normal from central differences of the sign field, if defined.
std::optional<Point> outwardNormal(const RegionSet& set, const Point& x);

}  // namespace nlgeom
