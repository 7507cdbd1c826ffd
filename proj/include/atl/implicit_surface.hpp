#pragma once

#include <string>
#include <vector>

#include "atl/grid.hpp"
#include "atl/rng.hpp"

namespace atl {

// Rigid placement: world = rotation * local + center. For dim == 2 only the
// upper 2x2 block of the rotation is used.
struct Placement {
    Vec center{0.0, 0.0, 0.0};
    std::array<std::array<double, 3>, 3> rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static Placement translation(const Vec& c);
    static Placement rotation_2d(double angle_deg, const Vec& center = {0, 0, 0});
    static Placement rotation_3d(const Vec& axis, double angle_deg, const Vec& center = {0, 0, 0});

    Vec to_local(const Vec& x) const;
    Vec to_world(const Vec& x) const;
    bool is_identity() const;
};

enum class SurfaceKind { Sphere, Ellipsoid, Dumbbell, Torus };

std::string to_string(SurfaceKind k);

struct MeanConvexityReport {
    double min_h = 0.0;
    Vec min_location{0, 0, 0};
    bool mean_convex = false;  // min_h > 0
    int samples = 0;
    int failed_projections = 0;
};

// Closed smooth hypersurface given as phi = 0 with phi > 0 inside.
class ImplicitSurface {
public:
    static ImplicitSurface sphere(int dim, double radius, const Placement& p = {});
    static ImplicitSurface ellipsoid(int dim, const Vec& semi_axes, const Placement& p = {});
    // Two balls at +-offset along the local x-axis joined by a capsule of the
    // given neck radius, blended with a log-sum-exp smooth union of width
    // `smoothing`. The mean-convex parameter range is empirical; the
    // constructor screens for it and flags the result.
    static ImplicitSurface dumbbell(int dim, double ball_offset, double ball_radius,
                                    double neck_radius, double smoothing, const Placement& p = {});
    static ImplicitSurface torus(double major_radius, double minor_radius, const Placement& p = {});

    SurfaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Placement& placement() const { return place_; }

    // phi(x): positive inside, negative outside, zero on the surface.
    double value(const Vec& x) const;
    // Exact signed distance for sphere and torus; phi / |grad phi| otherwise
    // (first order near the surface, capped away from it).
    double signed_distance(const Vec& x) const;
    bool inside(const Vec& x) const { return value(x) > 0.0; }

    // Mean curvature of the level set of phi through x with respect to the
    // outward normal (sum of principal curvatures), by central differences.
    double mean_curvature(const Vec& x) const;

    // Thinnest geometric feature, for grid-resolution heuristics.
    double min_feature_size() const;
    // Radius of a ball around the placement center containing the surface.
    double bounding_radius() const;
    // Half sizes of a local axis-aligned box containing the surface
    // (world-aligned only for identity rotations).
    Vec bounding_half_extents() const;

    // Set when the constructor's mean-convexity screen failed (dumbbell,
    // torus) so downstream runs can surface it.
    bool mean_convexity_warning() const { return warn_not_mean_convex_; }

    // Parameters, exposed for serialization.
    double param(int i) const { return params_[i]; }

private:
    ImplicitSurface() = default;
    double local_value(const Vec& local) const;

    SurfaceKind kind_ = SurfaceKind::Sphere;
    int dim_ = 3;
    std::array<double, 4> params_{};  // kind-specific
    Vec semi_axes_{1, 1, 1};
    Placement place_;
    bool warn_not_mean_convex_ = false;
};

// Samples `count` points on the zero set by projecting box-uniform points
// along grad phi; throws NumericalError when projection keeps failing.
std::vector<Vec> sample_zero_set(const ImplicitSurface& s, int count, std::uint64_t seed);

MeanConvexityReport check_initial_mean_convexity(const ImplicitSurface& s, int sample_count,
                                                 std::uint64_t seed);

}  // namespace atl
