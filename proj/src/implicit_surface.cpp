#include "atl/implicit_surface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "atl/errors.hpp"

namespace atl {

Placement Placement::translation(const Vec& c) {
    Placement p;
    p.center = c;
    return p;
}

Placement Placement::rotation_2d(double angle_deg, const Vec& center) {
    const double a = angle_deg * M_PI / 180.0;
    Placement p;
    p.center = center;
    p.rotation = {{{std::cos(a), -std::sin(a), 0.0}, {std::sin(a), std::cos(a), 0.0}, {0.0, 0.0, 1.0}}};
    return p;
}

Placement Placement::rotation_3d(const Vec& axis, double angle_deg, const Vec& center) {
    const double n = norm(axis);
    if (n <= 0.0) throw ConfigError("rotation axis must be nonzero");
    const Vec u = scale(1.0 / n, axis);
    const double a = angle_deg * M_PI / 180.0;
    const double c = std::cos(a), s = std::sin(a);
    Placement p;
    p.center = center;
    // Rodrigues: R = cI + s[u]_x + (1-c) u u^T
    const double ux = u[0], uy = u[1], uz = u[2];
    p.rotation = {{{c + (1 - c) * ux * ux, (1 - c) * ux * uy - s * uz, (1 - c) * ux * uz + s * uy},
                   {(1 - c) * uy * ux + s * uz, c + (1 - c) * uy * uy, (1 - c) * uy * uz - s * ux},
                   {(1 - c) * uz * ux - s * uy, (1 - c) * uz * uy + s * ux, c + (1 - c) * uz * uz}}};
    return p;
}

Vec Placement::to_local(const Vec& x) const {
    const Vec d = sub(x, center);
    Vec y{0, 0, 0};
    for (int i = 0; i < 3; ++i)
        y[i] = rotation[0][i] * d[0] + rotation[1][i] * d[1] + rotation[2][i] * d[2];
    return y;
}

Vec Placement::to_world(const Vec& y) const {
    Vec x = center;
    for (int i = 0; i < 3; ++i)
        x[i] += rotation[i][0] * y[0] + rotation[i][1] * y[1] + rotation[i][2] * y[2];
    return x;
}

bool Placement::is_identity() const {
    if (center != Vec{0, 0, 0}) return false;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (rotation[i][j] != (i == j ? 1.0 : 0.0)) return false;
    return true;
}

std::string to_string(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::Sphere: return "sphere";
        case SurfaceKind::Ellipsoid: return "ellipsoid";
        case SurfaceKind::Dumbbell: return "dumbbell";
        case SurfaceKind::Torus: return "torus";
    }
    return "unknown";
}

namespace {

void require_dim(int dim) {
    if (dim != 2 && dim != 3) throw ConfigError("surface dim must be 2 or 3");
}

double dist_to_segment(const Vec& x, const Vec& a, const Vec& b, int dim) {
    Vec ab = sub(b, a), ax = sub(x, a);
    double den = 0.0, num = 0.0;
    for (int i = 0; i < dim; ++i) {
        den += ab[i] * ab[i];
        num += ax[i] * ab[i];
    }
    const double t = std::clamp(den > 0.0 ? num / den : 0.0, 0.0, 1.0);
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double r = ax[i] - t * ab[i];
        d2 += r * r;
    }
    return std::sqrt(d2);
}

// Smooth max of phi[0..n), width s; reduces to hard max at s == 0.
double smooth_max(const double* phi, int n, double s) {
    double m = phi[0];
    for (int i = 1; i < n; ++i) m = std::max(m, phi[i]);
    if (s <= 0.0) return m;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::exp((phi[i] - m) / s);
    return m + s * std::log(acc);
}

}  // namespace

ImplicitSurface ImplicitSurface::sphere(int dim, double radius, const Placement& p) {
    require_dim(dim);
    if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
    ImplicitSurface s;
    s.kind_ = SurfaceKind::Sphere;
    s.dim_ = dim;
    s.params_[0] = radius;
    s.place_ = p;
    return s;
}

ImplicitSurface ImplicitSurface::ellipsoid(int dim, const Vec& semi_axes, const Placement& p) {
    require_dim(dim);
    for (int i = 0; i < dim; ++i)
        if (semi_axes[i] <= 0.0) throw ConfigError("ellipsoid semi-axes must be positive");
    ImplicitSurface s;
    s.kind_ = SurfaceKind::Ellipsoid;
    s.dim_ = dim;
    s.semi_axes_ = semi_axes;
    if (dim == 2) s.semi_axes_[2] = 1.0;
    s.place_ = p;
    return s;
}

ImplicitSurface ImplicitSurface::dumbbell(int dim, double ball_offset, double ball_radius,
                                          double neck_radius, double smoothing, const Placement& p) {
    require_dim(dim);
    if (ball_offset <= 0.0 || ball_radius <= 0.0 || neck_radius <= 0.0)
        throw ConfigError("dumbbell offsets and radii must be positive");
    if (neck_radius >= ball_radius)
        throw ConfigError("dumbbell neck radius must be below the ball radius");
    if (smoothing < 0.0) throw ConfigError("dumbbell smoothing must be nonnegative");
    ImplicitSurface s;
    s.kind_ = SurfaceKind::Dumbbell;
    s.dim_ = dim;
    s.params_ = {ball_offset, ball_radius, neck_radius, smoothing};
    s.place_ = p;
    MeanConvexityReport rep = check_initial_mean_convexity(s, 400, 7);
    s.warn_not_mean_convex_ = !rep.mean_convex;
    return s;
}

ImplicitSurface ImplicitSurface::torus(double major_radius, double minor_radius, const Placement& p) {
    if (minor_radius <= 0.0 || major_radius <= minor_radius)
        throw ConfigError("torus requires 0 < minor radius < major radius");
    ImplicitSurface s;
    s.kind_ = SurfaceKind::Torus;
    s.dim_ = 3;
    s.params_ = {major_radius, minor_radius, 0.0, 0.0};
    s.place_ = p;
    // Embedded mean convexity needs 1/r > 1/(R - r); screen confirms.
    MeanConvexityReport rep = check_initial_mean_convexity(s, 400, 7);
    s.warn_not_mean_convex_ = !rep.mean_convex;
    return s;
}

double ImplicitSurface::local_value(const Vec& y) const {
    switch (kind_) {
        case SurfaceKind::Sphere: {
            double r2 = 0.0;
            for (int i = 0; i < dim_; ++i) r2 += y[i] * y[i];
            return params_[0] - std::sqrt(r2);
        }
        case SurfaceKind::Ellipsoid: {
            double q = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double t = y[i] / semi_axes_[i];
                q += t * t;
            }
            return 1.0 - q;
        }
        case SurfaceKind::Dumbbell: {
            const double off = params_[0], rb = params_[1], rn = params_[2], s = params_[3];
            const Vec c1{-off, 0, 0}, c2{off, 0, 0};
            double d1 = 0.0, d2 = 0.0;
            for (int i = 0; i < dim_; ++i) {
                d1 += (y[i] - c1[i]) * (y[i] - c1[i]);
                d2 += (y[i] - c2[i]) * (y[i] - c2[i]);
            }
            const double phi[3] = {rb - std::sqrt(d1), rb - std::sqrt(d2),
                                   rn - dist_to_segment(y, c1, c2, dim_)};
            return smooth_max(phi, 3, s);
        }
        case SurfaceKind::Torus: {
            const double R = params_[0], r = params_[1];
            const double rho = std::sqrt(y[0] * y[0] + y[1] * y[1]);
            const double a = rho - R;
            return r - std::sqrt(a * a + y[2] * y[2]);
        }
    }
    throw ContractError("unreachable surface kind");
}

double ImplicitSurface::value(const Vec& x) const {
    return local_value(place_.is_identity() ? x : place_.to_local(x));
}

double ImplicitSurface::signed_distance(const Vec& x) const {
    const Vec y = place_.is_identity() ? x : place_.to_local(x);
    // Sphere and torus values are exact signed distances already; the
    // dumbbell blends unit-gradient distance fields, so its value is a
    // first-order signed distance up to the smoothing width.
    if (kind_ != SurfaceKind::Ellipsoid) return local_value(y);
    const double phi = local_value(y);
    const double h = 1e-5 * std::max(1.0, bounding_radius());
    double g2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
        Vec a = y, b = y;
        a[i] += h;
        b[i] -= h;
        const double gi = (local_value(a) - local_value(b)) / (2.0 * h);
        g2 += gi * gi;
    }
    // The cap keeps the estimate finite at the interior critical point; the
    // capped value there, the smallest semi-axis, is the true distance.
    const double cap = phi / min_feature_size();
    return phi / std::sqrt(g2 + cap * cap);
}

double ImplicitSurface::mean_curvature(const Vec& x) const {
    const double h = 1e-4 * std::max(0.05, min_feature_size());
    const double c0 = value(x);
    Vec g{0, 0, 0};
    double hess[3][3] = {};
    for (int i = 0; i < dim_; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double vp = value(xp), vm = value(xm);
        g[i] = (vp - vm) / (2.0 * h);
        hess[i][i] = (vp - 2.0 * c0 + vm) / (h * h);
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j) {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            hess[i][j] = hess[j][i] =
                (value(xpp) - value(xpm) - value(xmp) + value(xmm)) / (4.0 * h * h);
        }
    double g2 = 0.0, lap = 0.0, quad = 0.0;
    for (int i = 0; i < dim_; ++i) {
        g2 += g[i] * g[i];
        lap += hess[i][i];
        for (int j = 0; j < dim_; ++j) quad += hess[i][j] * g[i] * g[j];
    }
    if (g2 <= 0.0) throw NumericalError("mean curvature undefined: vanishing gradient");
    // phi > 0 inside, so the outward normal is -grad/|grad| and
    // H = -(lap - quad/g2) / |grad|.
    return -(lap - quad / g2) / std::sqrt(g2);
}

double ImplicitSurface::min_feature_size() const {
    switch (kind_) {
        case SurfaceKind::Sphere: return params_[0];
        case SurfaceKind::Ellipsoid: {
            double m = semi_axes_[0];
            for (int i = 1; i < dim_; ++i) m = std::min(m, semi_axes_[i]);
            return m;
        }
        case SurfaceKind::Dumbbell: return params_[2];
        case SurfaceKind::Torus: return params_[1];
    }
    return 0.0;
}

double ImplicitSurface::bounding_radius() const {
    switch (kind_) {
        case SurfaceKind::Sphere: return params_[0];
        case SurfaceKind::Ellipsoid: {
            double m = semi_axes_[0];
            for (int i = 1; i < dim_; ++i) m = std::max(m, semi_axes_[i]);
            return m;
        }
        case SurfaceKind::Dumbbell: return params_[0] + params_[1] + 3.0 * params_[3];
        case SurfaceKind::Torus: return params_[0] + params_[1];
    }
    return 0.0;
}

Vec ImplicitSurface::bounding_half_extents() const {
    switch (kind_) {
        case SurfaceKind::Sphere: {
            const double r = params_[0];
            return dim_ == 2 ? vec2(r, r) : vec3(r, r, r);
        }
        case SurfaceKind::Ellipsoid: {
            Vec e = semi_axes_;
            if (dim_ == 2) e[2] = 0.0;
            return e;
        }
        case SurfaceKind::Dumbbell: {
            // LSE inflates the union of the unit-gradient constituents by at
            // most s * log 3 in distance.
            const double slack = params_[3] * std::log(3.0);
            const double r = params_[1] + slack;
            const double x = params_[0] + r;
            return dim_ == 2 ? vec2(x, r) : vec3(x, r, r);
        }
        case SurfaceKind::Torus: {
            const double R = params_[0], r = params_[1];
            return vec3(R + r, R + r, r);
        }
    }
    return {0, 0, 0};
}

std::vector<Vec> sample_zero_set(const ImplicitSurface& s, int count, std::uint64_t seed) {
    if (count <= 0) throw ConfigError("sample count must be positive");
    Rng rng(Rng::mix(seed, 0x5a3b17u));
    const double B = 1.1 * s.bounding_radius();
    const double h = 1e-5 * std::max(1.0, s.bounding_radius());
    const double tol = 1e-10 * std::max(1.0, s.bounding_radius());
    std::vector<Vec> pts;
    pts.reserve(static_cast<size_t>(count));
    int failures = 0;
    const int max_attempts = 200 * count;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(pts.size()) < count; ++attempt) {
        Vec x{0, 0, 0};
        for (int i = 0; i < s.dim(); ++i) x[i] = s.placement().center[i] + rng.uniform(-B, B);
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
            const double phi = s.value(x);
            if (std::abs(phi) <= tol) {
                ok = true;
                break;
            }
            Vec g{0, 0, 0};
            double g2 = 0.0;
            for (int i = 0; i < s.dim(); ++i) {
                Vec a = x, b = x;
                a[i] += h;
                b[i] -= h;
                g[i] = (s.value(a) - s.value(b)) / (2.0 * h);
                g2 += g[i] * g[i];
            }
            if (g2 < 1e-18) break;
            double step = -phi / g2;
            // Damped for robustness far from the surface.
            const double cap = 0.5 * s.bounding_radius() / std::sqrt(g2);
            step = std::clamp(step, -cap, cap);
            for (int i = 0; i < s.dim(); ++i) x[i] += step * g[i];
        }
        if (ok)
            pts.push_back(x);
        else
            ++failures;
    }
    if (static_cast<int>(pts.size()) < count) {
        std::ostringstream os;
        os << "zero-set sampling failed: wanted " << count << ", got " << pts.size() << " after "
           << max_attempts << " attempts (" << failures << " non-converged projections) on "
           << to_string(s.kind());
        throw NumericalError(os.str());
    }
    return pts;
}

MeanConvexityReport check_initial_mean_convexity(const ImplicitSurface& s, int sample_count,
                                                 std::uint64_t seed) {
    MeanConvexityReport rep;
    std::vector<Vec> pts = sample_zero_set(s, sample_count, seed);
    rep.samples = static_cast<int>(pts.size());
    rep.min_h = std::numeric_limits<double>::infinity();
    for (const Vec& p : pts) {
        double h;
        try {
            h = s.mean_curvature(p);
        } catch (const NumericalError&) {
            ++rep.failed_projections;
            continue;
        }
        if (h < rep.min_h) {
            rep.min_h = h;
            rep.min_location = p;
        }
    }
    rep.mean_convex = std::isfinite(rep.min_h) && rep.min_h > 0.0;
    return rep;
}

}  // namespace atl
