#pragma once

namespace nlgeom {

/// |B_1| in R^d, pi^{d/2} / Gamma(d/2 + 1).
double unitBallVolume(int dim);

/// Surface measure of the unit sphere S^{d-1}, d |B_1|. Equals 2 for d = 1.
double unitSphereArea(int dim);

double ballVolume(int dim, double radius);

/// Volume of the cap of height h in [0, 2a] cut from a ball of radius a.
double capVolume(int dim, double radius, double height);

/// |B_a(p) ∩ B_b(q)| for balls whose centres are `separation` apart.
double lensVolume(int dim, double a, double b, double separation);

}  // namespace nlgeom
