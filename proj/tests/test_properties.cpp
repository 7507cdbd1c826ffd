#include <cmath>
#include <cstdint>
#include <vector>

#include "atl/analytic_arrival.hpp"
#include "atl/implicit_surface.hpp"
#include "atl/levelset.hpp"
#include "atl/regularity.hpp"
#include "atl/stencils.hpp"
#include "doctest.h"

using namespace atl;

namespace {

double linf_vs_oracle(const ArrivalResult& res, double mask_radius) {
    const GridSpec& g = res.u.grid;
    const ScalarField oracle = AnalyticArrival::sphere(2, 1.0).sample(g, "oracle");
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vec x = g.coord(g.unflatten(p));
        if (std::hypot(x[0], x[1]) > mask_radius) continue;
        const double d = std::abs(res.u.values[p] - oracle.values[p]);
        if (std::isfinite(d)) worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace

TEST_CASE("fronts of nested disks keep their arrival order") {
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 32, 1.25);
    SolverOptions opts;
    const ArrivalResult big = solve_arrival(ImplicitSurface::sphere(2, 1.0), g, opts);
    const ArrivalResult small = solve_arrival(ImplicitSurface::sphere(2, 0.6), g, opts);
    std::size_t both = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!small.arrived.flags[p] || !big.arrived.flags[p]) continue;
        ++both;
        CHECK(small.u.values[p] <= big.u.values[p] + 2 * g.spacing);
    }
    CHECK(both > 1000);
}

TEST_CASE("mirror-symmetric surfaces produce mirror-symmetric arrival times") {
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 32, 1.25);
    SolverOptions opts;
    const ArrivalResult res =
        solve_arrival(ImplicitSurface::ellipsoid(2, Vec{1.0, 0.7, 1.0}), g, opts);
    // The cross-derivative sums associate differently on the two sides, so
    // symmetry holds to rounding accumulation, not bitwise.
    std::size_t nan_mismatches = 0;
    double worst = 0.0;
    for (int i = 0; i < g.counts[0]; ++i)
        for (int j = 0; j < g.counts[1]; ++j) {
            const double a = res.u.at(Idx{i, j, 0});
            const double b = res.u.at(Idx{g.counts[0] - 1 - i, j, 0});
            if (std::isnan(a) != std::isnan(b)) ++nan_mismatches;
            if (std::isnan(a) || std::isnan(b)) continue;
            worst = std::max(worst, std::abs(a - b));
        }
    CHECK(nan_mismatches == 0);
    CHECK(worst <= 1e-12);
}

TEST_CASE("swapping the ellipse axes transposes the arrival field") {
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 32, 1.25);
    SolverOptions opts;
    const ArrivalResult a =
        solve_arrival(ImplicitSurface::ellipsoid(2, Vec{1.0, 0.7, 1.0}), g, opts);
    const ArrivalResult b =
        solve_arrival(ImplicitSurface::ellipsoid(2, Vec{0.7, 1.0, 1.0}), g, opts);
    for (int i = 0; i < g.counts[0]; ++i)
        for (int j = 0; j < g.counts[1]; ++j) {
            const double ua = a.u.at(Idx{i, j, 0});
            const double ub = b.u.at(Idx{j, i, 0});
            if (std::isnan(ua)) {
                CHECK(std::isnan(ub));
            } else {
                CHECK(ua == doctest::Approx(ub).epsilon(1e-12));
            }
        }
}

TEST_CASE("halving the spacing shrinks the disk arrival error") {
    SolverOptions opts;
    const ArrivalResult coarse = solve_arrival(
        ImplicitSurface::sphere(2, 1.0), GridSpec::centered_cube(2, 1.0 / 16, 1.25), opts);
    const ArrivalResult fine = solve_arrival(
        ImplicitSurface::sphere(2, 1.0), GridSpec::centered_cube(2, 1.0 / 32, 1.25), opts);
    const double e16 = linf_vs_oracle(coarse, 0.9);
    const double e32 = linf_vs_oracle(fine, 0.9);
    CHECK(e32 < e16);
    CHECK(e16 / e32 >= 1.2);
}

TEST_CASE("solving a rotated surface commutes with rotating the samples") {
    const double angle = 37.0;
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 32, 1.25);
    SolverOptions opts;
    const ArrivalResult plain =
        solve_arrival(ImplicitSurface::ellipsoid(2, Vec{1.0, 0.7, 1.0}), g, opts);
    const ArrivalResult turned = solve_arrival(
        ImplicitSurface::ellipsoid(2, Vec{1.0, 0.7, 1.0}, Placement::rotation_2d(angle)), g,
        opts);
    const double c = std::cos(angle * M_PI / 180), s = std::sin(angle * M_PI / 180);
    // Probe points well inside the narrow axis so both fields are smooth there.
    for (int ix = -4; ix <= 4; ++ix)
        for (int iy = -4; iy <= 4; ++iy) {
            const Vec x{0.06 * ix, 0.06 * iy, 0.0};
            const Vec rx{c * x[0] - s * x[1], s * x[0] + c * x[1], 0.0};
            const double u0 = interpolate(plain.u, x);
            const double u1 = interpolate(turned.u, rx);
            REQUIRE(std::isfinite(u0));
            REQUIRE(std::isfinite(u1));
            CHECK(std::abs(u0 - u1) <= 0.04);  // both carry O(h) solver error
        }
}

TEST_CASE("the solved disk's critical points carry the round spectrum") {
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 32, 1.25);
    SolverOptions opts;
    const ArrivalResult res = solve_arrival(ImplicitSurface::sphere(2, 1.0), g, opts);
    const auto cps = find_critical_points(res);
    REQUIRE(!cps.empty());
    for (const auto& cp : cps) {
        CHECK(cp.classified_k == 1);
        CHECK(cp.spectrum_residual <= 0.2);
        CHECK(std::hypot(cp.location[0], cp.location[1]) <= 3 * g.spacing);
    }
}
