#pragma once

#include <memory>
#include <vector>

#include "nlgeom/sets.hpp"

namespace nlgeom::detail {

/// |{y in B_R(0) : y_1 < t}|.
double belowPlaneVolume(int dim, double radius, double t);

/// Builds a chord from unsorted candidate crossing parameters by classifying
/// each sub-interval at its midpoint and keeping only genuine state changes.
Chord chordFromCandidates(const Shape& shape, const Point& origin, const Point& dir, double tmin,
                          double tmax, std::vector<double> candidates);

/// Chord of a union of open intervals (lo, hi) along the line.
Chord chordFromIntervals(std::vector<std::pair<double, double>> intervals, double tmin, double tmax);

/// Roots of |origin + t dir - c|^2 = r^2 (dir unit), if the line meets the open ball.
bool sphereRoots(const Point& origin, const Point& dir, const Point& c, double r, double& t1,
                 double& t2);

std::shared_ptr<const Shape> makeBallUnionShape(std::vector<Point> centers, std::vector<double> radii,
                                                Point anchor);

Point pointFromJson(const nlohmann::json& j, int dim, const char* what);
nlohmann::json pointToJson(const Point& p);

}  // namespace nlgeom::detail
