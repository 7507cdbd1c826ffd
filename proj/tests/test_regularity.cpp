#include <cmath>

#include "atl/analytic_arrival.hpp"
#include "atl/errors.hpp"
#include "atl/regularity.hpp"
#include "doctest.h"

using namespace atl;

namespace {

ArrivalResult exact_cylinder(double h = 1.0 / 16.0, double half = 0.5) {
    const auto cyl = AnalyticArrival::cylinder(3, 1);
    return wrap_field(cyl.sample(GridSpec::centered_cube(3, h, half), "u"));
}

ArrivalResult exact_circle(double h = 1.0 / 32.0, double r0 = 0.6, double half = 0.8) {
    const auto sph = AnalyticArrival::sphere(2, r0);
    return wrap_field(sph.sample(GridSpec::centered_cube(2, h, half), "u"));
}

ArrivalResult exact_sphere3(double h = 1.0 / 16.0, double r0 = 0.6, double half = 0.8) {
    const auto sph = AnalyticArrival::sphere(3, r0);
    return wrap_field(sph.sample(GridSpec::centered_cube(3, h, half), "u"));
}

SymMat diag3(double a, double b, double c) {
    SymMat s;
    s(0, 0) = a;
    s(1, 1) = b;
    s(2, 2) = c;
    return s;
}

}  // namespace

TEST_CASE("spectrum classification on closed-form inputs") {
    auto r = classify_critical(diag3(-0.5, -0.5, -0.5), 2);
    CHECK(r.k == 2);
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-12));

    r = classify_critical(diag3(-0.95, -1.05, 0.02), 2);
    CHECK(r.k == 1);
    CHECK(r.residual == doctest::Approx(0.05));

    r = classify_critical(SymMat{}, 2);
    CHECK(r.k == 0);  // zero matrix admits no class
    CHECK(r.residual == doctest::Approx(0.5));

    r = classify_critical(diag3(-1.0, -1.0, 0.0), 1);  // d=2 spherical
    CHECK(r.k == 1);
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("classification ignores the eigenbasis") {
    const Placement rot = Placement::rotation_3d(vec3(0.3, -0.8, 0.5), 63.0);
    const SymMat d = diag3(-1.02, -0.97, 0.03);
    SymMat c;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                s += rot.rotation[i][a] * d(i, i) * rot.rotation[i][b];
            c(a, b) = s;
        }
    const auto plain = classify_critical(d, 2);
    const auto conj = classify_critical(c, 2);
    CHECK(conj.k == plain.k);
    CHECK(conj.residual == doctest::Approx(plain.residual).epsilon(1e-9));
}

TEST_CASE("classification rejects bad input") {
    SymMat bad;
    bad(0, 1) = 0.3;  // upper only, asymmetric
    CHECK_THROWS_AS(classify_critical(bad, 2), ContractError);
    CHECK_THROWS_AS(classify_critical(SymMat{}, 0), ContractError);
    CHECK_THROWS_AS(classify_critical(SymMat{}, 3), ContractError);
}

TEST_CASE("cylinder axis nodes are all detected and classify as k=1") {
    const auto res = exact_cylinder();
    const auto pts = find_critical_points(res, 2.0);
    const GridSpec& g = res.u.grid;
    REQUIRE(pts.size() == static_cast<std::size_t>(g.counts[2] - 4));
    for (const auto& p : pts) {
        CHECK(p.grad_norm == 0.0);
        CHECK(std::abs(p.location[0]) < 1e-12);
        CHECK(std::abs(p.location[1]) < 1e-12);
        CHECK(p.classified_k == 1);
        CHECK(p.spectrum_residual < 1e-10);
        CHECK(p.equation_residual_b < 1e-10);
    }
}

TEST_CASE("circle field yields exactly the center critical point") {
    const auto res = exact_circle();
    const auto pts = find_critical_points(res, 2.0);
    REQUIRE(pts.size() == 1);
    CHECK(norm(pts[0].location) < 1e-12);
    CHECK(pts[0].classified_k == 1);  // k = n = 1 in d = 2
    CHECK(pts[0].spectrum_residual < 1e-10);
    CHECK(pts[0].eigen.values[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(pts[0].eigen.values[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("classical residual vanishes on exact fields") {
    const auto res = exact_cylinder();
    // Off-axis regular node.
    const Idx off{8, 11, 8};
    CHECK(norm(gradient_cd(res.u, off)) > 0.1);
    CHECK(check_classical(res.u, off, false) < 1e-6);

    // Spherical extinction point in d=3: Hess = -I/2, any v works.
    const auto sph = exact_sphere3();
    const Idx c{static_cast<int>(sph.u.grid.counts[0] / 2),
                static_cast<int>(sph.u.grid.counts[1] / 2),
                static_cast<int>(sph.u.grid.counts[2] / 2)};
    CHECK(norm(gradient_cd(sph.u, c)) < 1e-12);
    CHECK(check_classical(sph.u, c, true) < 1e-10);
}

TEST_CASE("critical residual is controlled by the spectrum residual") {
    // Perturbed cylinders: residual_B <= (n+2) * spectrum_residual + tol.
    const GridSpec g = GridSpec::centered_cube(3, 1.0 / 16.0, 0.5);
    const auto cyl = AnalyticArrival::cylinder(3, 1);
    Rng rng(Rng::mix(2024, 11));
    for (int trial = 0; trial < 20; ++trial) {
        double c[6];
        for (double& v : c) v = 0.05 * rng.sym();
        auto u = ScalarField::sample(g, "u", [&](const Vec& x) {
            return cyl.value(x) + c[0] * x[0] * x[0] + c[1] * x[1] * x[1] +
                   c[2] * x[2] * x[2] + c[3] * x[0] * x[1] + c[4] * x[0] * x[2] +
                   c[5] * x[1] * x[2];
        });
        const Idx center{g.counts[0] / 2, g.counts[1] / 2, g.counts[2] / 2};
        const SymMat hm = hessian_cd(u, center);
        const auto cls = classify_critical(hm, 2);
        REQUIRE(cls.k == 1);
        const double rb = check_classical(u, center, true);
        CHECK(rb <= (2 + 2) * cls.residual + 1e-9);
    }
}

TEST_CASE("viscosity checker accepts exact fields for any seed") {
    const auto cyl = exact_cylinder();
    const auto circ = exact_circle();
    const Idx axis{8, 8, 8};
    const Idx reg2{16, 20, 0};  // regular node of the circle grid
    for (const std::uint64_t seed : {1ull, 77ull, 991ull}) {
        const auto ra = check_viscosity(cyl, axis, 60, 3, seed);
        CHECK(ra.violations == 0);
        CHECK(ra.tested + ra.skipped == 120);
        const auto rr = check_viscosity(circ, reg2, 60, 3, seed);
        CHECK(rr.violations == 0);
        CHECK(rr.tested > 0);
    }
}

TEST_CASE("viscosity ball must stay inside the arrived set and the grid") {
    auto res = exact_circle();
    CHECK_THROWS_AS(check_viscosity(res, Idx{1, 20, 0}, 5, 3, 9),
                    ContractError);  // leaves the grid
    res.u.at(Idx{18, 20, 0}) = std::numeric_limits<double>::quiet_NaN();
    res.arrived.set(Idx{18, 20, 0}, false);
    CHECK_THROWS_AS(check_viscosity(res, Idx{16, 20, 0}, 5, 3, 9),
                    ContractError);  // hole in the mask
}

TEST_CASE("level-set radii around a cylinder neck give sqrt(2)") {
    const auto res = exact_cylinder();
    const auto pts = find_critical_points(res, 2.0);
    const auto& p = pts[pts.size() / 2];  // center axis node
    const auto fits = tangent_flow_profile(res, p, {0.01, 0.02, 0.04});
    REQUIRE(fits.size() == 3);
    for (const auto& f : fits) {
        CHECK(f.points >= 10);
        CHECK(f.mean_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(f.spread < 1e-9);
    }
}

TEST_CASE("level-set radii around sphere centers give sqrt(2 n)") {
    const auto sph = exact_sphere3();
    const auto pts = find_critical_points(sph, 2.0);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].classified_k == 2);
    const auto fits = tangent_flow_profile(sph, pts[0], {0.005, 0.01});
    for (const auto& f : fits)
        CHECK(f.mean_ratio == doctest::Approx(2.0).epsilon(1e-9));

    const auto circ = exact_circle();
    const auto cpts = find_critical_points(circ, 2.0);
    const auto cfits = tangent_flow_profile(circ, cpts[0], {0.01, 0.02});
    for (const auto& f : cfits)
        CHECK(f.mean_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("profile extraction reports insufficient sampling") {
    const auto res = exact_circle();
    const auto pts = find_critical_points(res, 2.0);
    const double h = res.u.grid.spacing;
    // Level circle radius sqrt(2 tau) < h: only the four edges incident to
    // the center node cross, below the 10-sample floor.
    CHECK_THROWS_AS(tangent_flow_profile(res, pts[0], {0.25 * h * h}),
                    NumericalError);
}

TEST_CASE("axis decay is zero along an exact cylinder axis") {
    const auto res = exact_cylinder(1.0 / 16.0, 0.8);
    const auto pts = find_critical_points(res, 2.0);
    const auto& p = pts[pts.size() / 2];
    const double h = res.u.grid.spacing;
    const auto rows = axis_decay(res, p, vec3(0, 0, 1), {4 * h, 8 * h});
    for (const auto& r : rows) CHECK(r.ratio < 1e-12);
}

TEST_CASE("axis decay picks up the tilt component exactly") {
    const auto res = exact_cylinder(1.0 / 16.0, 0.8);
    const auto pts = find_critical_points(res, 2.0);
    const auto& p = pts[pts.size() / 2];
    const double h = res.u.grid.spacing;
    Vec v = vec3(0.12, 0.0, 1.0);
    const double sin_theta = 0.12 / norm(v);
    // Gradients of quadratics are linear, so the sampled gradient is exact
    // even off the lattice: ratio -> |sin theta| / k.
    const auto rows = axis_decay(res, p, v, {4 * h, 8 * h});
    for (const auto& r : rows)
        CHECK(r.ratio == doctest::Approx(sin_theta).epsilon(1e-10));
}

TEST_CASE("axis decay rejects off-cone and axis-free requests") {
    const auto res = exact_cylinder(1.0 / 16.0, 0.8);
    const auto pts = find_critical_points(res, 2.0);
    const auto& p = pts[pts.size() / 2];
    const double h = res.u.grid.spacing;
    CHECK_THROWS_AS(axis_decay(res, p, vec3(0.4, 0.0, 1.0), {4 * h}),
                    ContractError);  // ~22 degrees off axis

    const auto sph = exact_sphere3();
    const auto spts = find_critical_points(sph, 2.0);
    CHECK_THROWS_AS(axis_decay(sph, spts[0], vec3(0, 0, 1), {4 * h}),
                    ContractError);  // k = n, no zero eigenspace
}

TEST_CASE("hessian size bounds on exact fields") {
    const auto cyl = exact_cylinder();
    const auto pc = pinching_and_c11(cyl, 0.2);
    CHECK(pc.sample_count > 0);
    CHECK(pc.c11_bound == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pc.pinching_max == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pc.pinching_max <= pc.c11_bound + 1e-12);

    const auto circ = exact_circle();
    const auto pr = pinching_and_c11(circ, 0.2);
    CHECK(pr.c11_bound == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(pinching_and_c11(circ, 99.0), NumericalError);
}

TEST_CASE("blow-up exponent is exactly one half on exact fields") {
    const auto cyl = exact_cylinder();
    const auto pts = find_critical_points(cyl, 2.0);
    const double h = cyl.u.grid.spacing;
    CHECK(blowup_exponent(cyl, pts[pts.size() / 2], 6 * h) ==
          doctest::Approx(0.5).epsilon(1e-10));

    const auto circ = exact_circle();
    const auto cpts = find_critical_points(circ, 2.0);
    CHECK(blowup_exponent(circ, cpts[0], 8 * h) ==
          doctest::Approx(0.5).epsilon(1e-10));

    // Constant field: no usable samples.
    auto flat = wrap_field(ScalarField(circ.u.grid, "u", 1.0));
    CriticalPointRecord fake;
    fake.index = cpts[0].index;
    fake.location = cpts[0].location;
    CHECK_THROWS_AS(blowup_exponent(flat, fake, 8 * h), NumericalError);
}

TEST_CASE("summary aggregates critical set and residual quantiles") {
    const auto res = exact_cylinder();
    const auto s = summarize_regularity(res, 0.2, 2.0, 3);
    CHECK(s.h == res.u.grid.spacing);
    CHECK(!s.critical_points.empty());
    CHECK(s.regular_count > 0);
    CHECK(s.classical.count > 0);
    CHECK(s.classical.median < 1e-7);
    CHECK(s.classical.q95 < 1e-6);
    CHECK(s.pinching.c11_bound == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled gradient interpolates node gradients exactly for linears") {
    const GridSpec g = GridSpec::centered_cube(2, 0.125, 1.0);
    auto u = ScalarField::sample(
        g, "u", [](const Vec& x) { return 0.7 * x[0] - 0.3 * x[1] + 0.2; });
    const auto res = wrap_field(std::move(u));
    const Vec gr = sampled_gradient(res.u, res.arrived, vec2(0.31, -0.47));
    CHECK(gr[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(gr[1] == doctest::Approx(-0.3).epsilon(1e-12));
}
