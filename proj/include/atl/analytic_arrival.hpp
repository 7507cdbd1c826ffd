#pragma once

#include "atl/grid.hpp"
#include "atl/implicit_surface.hpp"

namespace atl {

// Closed-form arrival times of shrinking round spheres and cylinders under
// mean curvature flow. Both satisfy the degenerate elliptic arrival-time
// equation with right-hand side -1.
class AnalyticArrival {
public:
    // Sphere of initial radius r0 in R^dim: u = (r0^2 - |x - c|^2) / (2 (dim-1)),
    // nonnegative inside, extinction at the center with value r0^2 / (2 (dim-1)).
    static AnalyticArrival sphere(int dim, double initial_radius, const Vec& center = {0, 0, 0});

    // Cylinder S^k x R^(dim-1-k) reaching its axis at time 0:
    // u = -(1/2k) * sum of the first k+1 squared local coordinates.
    // Nonpositive; the frame columns of `place` give the shrinking directions.
    static AnalyticArrival cylinder(int dim, int k, const Placement& place = {});

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;

    int dim() const { return dim_; }
    bool is_cylinder() const { return cylinder_k_ > 0; }
    int cylinder_k() const { return cylinder_k_; }
    double extinction_value() const;  // sphere only

    ScalarField sample(const GridSpec& g, const std::string& label) const;

private:
    AnalyticArrival() = default;
    int dim_ = 2;
    int cylinder_k_ = 0;  // 0 means sphere
    double radius_ = 1.0;
    Placement place_;
};

}  // namespace atl
