#include "atl/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "atl/errors.hpp"
#include "atl/stencils.hpp"

namespace atl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void throw_unstable(long step_index) {
    std::ostringstream os;
    os << "level-set update produced a non-finite value";
    if (step_index >= 0) os << " at step " << step_index;
    throw NumericalError(os.str());
}

}  // namespace

void SolverOptions::validate() const {
    if (!(cfl > 0.0) || cfl > 0.25)
        throw ConfigError("cfl must lie in (0, 0.25]; explicit curvature stepping is "
                          "unstable beyond h^2/4");
    if (!(delta_reg > 0.0)) throw ConfigError("delta_reg must be positive");
    if (t_max < 0.0) throw ConfigError("t_max must be positive (or 0 for automatic)");
    if (redistance_every < 0) throw ConfigError("redistance_every must be >= 0");
    for (double t : record_snapshots)
        if (t < 0.0) throw ConfigError("snapshot times must be nonnegative");
}

ScalarField evolve_step(const ScalarField& v, double dt, double delta_reg, long step_index) {
    if (!(dt > 0.0)) throw ContractError("evolve_step needs dt > 0");
    const double h = v.grid.spacing;
    if (dt > 0.25 * h * h * (1.0 + 1e-12))
        throw ContractError("evolve_step needs dt <= h^2/4 (explicit stability envelope)");
    if (!(delta_reg > 0.0)) throw ContractError("evolve_step needs delta_reg > 0");

    ScalarField out = v;  // freezes the rind
    const stencil::View w = stencil::make_view(v);
    const auto& c = v.grid.counts;
    bool bad = false;
    if (v.grid.dim == 2) {
#pragma omp parallel for schedule(static) reduction(|| : bad)
        for (int i0 = 1; i0 < c[0] - 1; ++i0) {
            for (int i1 = 1; i1 < c[1] - 1; ++i1) {
                const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(i0) * c[1] + i1;
                const double nv = v.values[p] + dt * stencil::one_laplacian_at(w, p, delta_reg);
                out.values[p] = nv;
                bad = bad || !std::isfinite(nv);
            }
        }
    } else {
#pragma omp parallel for schedule(static) reduction(|| : bad)
        for (int i0 = 1; i0 < c[0] - 1; ++i0) {
            for (int i1 = 1; i1 < c[1] - 1; ++i1) {
                const std::ptrdiff_t row = (static_cast<std::ptrdiff_t>(i0) * c[1] + i1) * c[2];
                for (int i2 = 1; i2 < c[2] - 1; ++i2) {
                    const std::ptrdiff_t p = row + i2;
                    const double nv = v.values[p] + dt * stencil::one_laplacian_at(w, p, delta_reg);
                    out.values[p] = nv;
                    bad = bad || !std::isfinite(nv);
                }
            }
        }
    }
    if (bad) throw_unstable(step_index);
    return out;
}

namespace {

// Godunov upwind solution of |grad d| = 1 from the per-axis minimal
// neighbor values m[0..dim), h the spacing.
double eikonal_update(double* m, int dim, double h) {
    std::sort(m, m + dim);
    double x = m[0] + h;
    if (dim >= 2 && x > m[1]) {
        const double s = m[0] + m[1];
        const double disc = 2.0 * h * h - (m[0] - m[1]) * (m[0] - m[1]);
        x = 0.5 * (s + std::sqrt(std::max(disc, 0.0)));
        if (dim == 3 && x > m[2]) {
            const double sum = m[0] + m[1] + m[2];
            const double sq = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
            const double disc3 = sum * sum - 3.0 * (sq - h * h);
            x = (sum + std::sqrt(std::max(disc3, 0.0))) / 3.0;
        }
    }
    return x;
}

}  // namespace

ScalarField redistance(const ScalarField& v) {
    const GridSpec& g = v.grid;
    g.validate();
    const double h = g.spacing;
    const int dim = g.dim;
    const auto& c = g.counts;
    const std::ptrdiff_t stride[3] = {static_cast<std::ptrdiff_t>(c[1]) * c[2], c[2], 1};
    const std::size_t n = g.size();

    std::vector<double> dist(n, kInf);
    std::vector<std::uint8_t> frozen(n, 0);

    // Seed the band of nodes adjacent to the zero crossing. Per axis, the
    // nearest crossing fraction f_a comes from linear interpolation; the
    // local interface is then approximated by the plane with intercepts
    // f_a h, giving d = h / sqrt(sum 1/f_a^2).
    bool any = false;
    for (std::size_t p = 0; p < n; ++p) {
        const double vp = v.values[p];
        if (vp == 0.0) {
            dist[p] = 0.0;
            frozen[p] = 1;
            any = true;
            continue;
        }
        const Idx i = g.unflatten(p);
        double inv2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double f = kInf;
            if (i[a] + 1 < c[a]) {
                const double vq = v.values[p + stride[a]];
                if (vp * vq < 0.0) f = std::abs(vp) / (std::abs(vp) + std::abs(vq));
            }
            if (i[a] > 0) {
                const double vq = v.values[p - stride[a]];
                if (vp * vq < 0.0)
                    f = std::min(f, std::abs(vp) / (std::abs(vp) + std::abs(vq)));
            }
            if (f < kInf) inv2 += 1.0 / (f * f);
        }
        if (inv2 > 0.0) {
            dist[p] = h / std::sqrt(inv2);
            frozen[p] = 1;
            any = true;
        }
    }
    if (!any) throw ContractError("redistance requires a sign change in the field");

    // Fast sweeping: all 2^dim axis orderings, two rounds.
    const int sweeps = 1 << dim;
    for (int round = 0; round < 2; ++round) {
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            const int d0 = (sweep & 1) ? -1 : 1;
            const int d1 = (sweep & 2) ? -1 : 1;
            const int d2 = (sweep & 4) ? -1 : 1;
            const int b0 = d0 > 0 ? 0 : c[0] - 1, e0 = d0 > 0 ? c[0] : -1;
            const int b1 = d1 > 0 ? 0 : c[1] - 1, e1 = d1 > 0 ? c[1] : -1;
            const int b2 = d2 > 0 ? 0 : c[2] - 1, e2 = d2 > 0 ? c[2] : -1;
            for (int i0 = b0; i0 != e0; i0 += d0)
                for (int i1 = b1; i1 != e1; i1 += d1)
                    for (int i2 = b2; i2 != e2; i2 += d2) {
                        const std::ptrdiff_t p = (static_cast<std::ptrdiff_t>(i0) * c[1] + i1) * c[2] + i2;
                        if (frozen[p]) continue;
                        const Idx idx{i0, i1, i2};
                        double m[3];
                        for (int a = 0; a < dim; ++a) {
                            double lo = kInf, hi = kInf;
                            if (idx[a] > 0) lo = dist[p - stride[a]];
                            if (idx[a] + 1 < c[a]) hi = dist[p + stride[a]];
                            m[a] = std::min(lo, hi);
                        }
                        const double x = eikonal_update(m, dim, h);
                        if (x < dist[p]) dist[p] = x;
                    }
        }
    }

    ScalarField out(g, v.label);
    for (std::size_t p = 0; p < n; ++p)
        out.values[p] = (v.values[p] >= 0.0 ? 1.0 : -1.0) * dist[p];
    return out;
}

namespace {

void check_padding(const ImplicitSurface& surface, const GridSpec& grid) {
    Vec he = surface.bounding_half_extents();
    if (!surface.placement().is_identity()) {
        // A rotated surface gets the conservative isotropic bound.
        const double B = surface.bounding_radius();
        he = grid.dim == 2 ? vec2(B, B) : vec3(B, B, B);
    }
    const Vec c = surface.placement().center;
    for (int a = 0; a < grid.dim; ++a) {
        const double lo = c[a] - he[a], hi = c[a] + he[a];
        const double hull_lo = grid.origin[a], hull_hi = grid.origin[a] + grid.extent(a);
        const double pad = 0.1 * (hi - lo);
        if (lo - hull_lo < pad - 1e-12 || hull_hi - hi < pad - 1e-12) {
            std::ostringstream os;
            os << "surface needs >= 10% free padding inside the grid on axis " << a
               << ": surface spans [" << lo << ", " << hi << "], hull [" << hull_lo << ", "
               << hull_hi << "]";
            throw ConfigError(os.str());
        }
    }
}

}  // namespace

ArrivalResult solve_arrival(const ImplicitSurface& surface, const GridSpec& grid,
                            const SolverOptions& opts, const SnapshotCallback& on_snapshot) {
    grid.validate();
    opts.validate();
    if (surface.dim() != grid.dim) throw ConfigError("surface/grid dimension mismatch");
    check_padding(surface, grid);

    std::vector<std::string> warnings;
    if (surface.min_feature_size() < 6.0 * grid.spacing) {
        std::ostringstream os;
        os << "thinnest surface feature (" << surface.min_feature_size() << ") spans fewer than 6 "
           << "cells at h = " << grid.spacing << "; arrival times there are unreliable";
        warnings.push_back(os.str());
    }
    if (surface.mean_convexity_warning())
        warnings.push_back("initial surface failed the mean-convexity screen");

    ScalarField v0 = ScalarField::sample(
        grid, "v", [&](const Vec& x) { return surface.signed_distance(x); });
    ArrivalResult res = solve_arrival_from_field(v0, opts, on_snapshot);
    res.warnings.insert(res.warnings.begin(), warnings.begin(), warnings.end());
    return res;
}

ArrivalResult solve_arrival_from_field(const ScalarField& v0, const SolverOptions& opts,
                                       const SnapshotCallback& on_snapshot) {
    const GridSpec& g = v0.grid;
    g.validate();
    opts.validate();
    const double h = g.spacing;
    const double dt = opts.cfl * h * h;
    const double t_max = opts.t_max > 0.0 ? opts.t_max : 2.0 * g.diameter() * g.diameter();
    const auto& c = g.counts;
    const std::size_t n = g.size();

    ArrivalResult res;
    res.u = ScalarField(g, "u", kNaN);
    res.arrived = Mask(g);
    res.initial_interior = Mask(g);

    long remaining = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (v0.values[p] > 0.0) {
            res.initial_interior.flags[p] = 1;
            if (g.interior(g.unflatten(p))) ++remaining;
        }
    }

    std::vector<double> snaps = opts.record_snapshots;
    std::sort(snaps.begin(), snaps.end());
    std::size_t snap_idx = 0;

    ScalarField cur = v0, nxt = v0;
    double t = 0.0;
    long step = 0;
    long recross_events = 0;

    while (remaining > 0 && t < t_max) {
        const stencil::View w = stencil::make_view(cur);
        bool bad = false;
        long crossings = 0;
        if (g.dim == 2) {
#pragma omp parallel for schedule(static) reduction(|| : bad) reduction(+ : crossings, recross_events)
            for (int i0 = 1; i0 < c[0] - 1; ++i0) {
                for (int i1 = 1; i1 < c[1] - 1; ++i1) {
                    const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(i0) * c[1] + i1;
                    const double ov = cur.values[p];
                    const double nv = ov + dt * stencil::one_laplacian_at(w, p, opts.delta_reg);
                    nxt.values[p] = nv;
                    bad = bad || !std::isfinite(nv);
                    if (!res.arrived.flags[p]) {
                        if (ov > 0.0 && nv <= 0.0) {
                            res.u.values[p] = t + dt * ov / (ov - nv);
                            res.arrived.flags[p] = 1;
                            if (res.initial_interior.flags[p]) ++crossings;
                        }
                    } else if (nv > 0.0) {
                        ++recross_events;
                    }
                }
            }
        } else {
#pragma omp parallel for schedule(static) reduction(|| : bad) reduction(+ : crossings, recross_events)
            for (int i0 = 1; i0 < c[0] - 1; ++i0) {
                for (int i1 = 1; i1 < c[1] - 1; ++i1) {
                    const std::ptrdiff_t row = (static_cast<std::ptrdiff_t>(i0) * c[1] + i1) * c[2];
                    for (int i2 = 1; i2 < c[2] - 1; ++i2) {
                        const std::ptrdiff_t p = row + i2;
                        const double ov = cur.values[p];
                        const double nv = ov + dt * stencil::one_laplacian_at(w, p, opts.delta_reg);
                        nxt.values[p] = nv;
                        bad = bad || !std::isfinite(nv);
                        if (!res.arrived.flags[p]) {
                            if (ov > 0.0 && nv <= 0.0) {
                                res.u.values[p] = t + dt * ov / (ov - nv);
                                res.arrived.flags[p] = 1;
                                if (res.initial_interior.flags[p]) ++crossings;
                            }
                        } else if (nv > 0.0) {
                            ++recross_events;
                        }
                    }
                }
            }
        }
        if (bad) throw_unstable(step);
        remaining -= crossings;
        t += dt;
        ++step;

        while (snap_idx < snaps.size() && snaps[snap_idx] <= t + 1e-15) {
            if (on_snapshot) on_snapshot(snaps[snap_idx], nxt);
            ++snap_idx;
        }
        if (opts.redistance_every > 0 && step % opts.redistance_every == 0 && remaining > 0)
            nxt = redistance(nxt);
        std::swap(cur.values, nxt.values);
    }

    res.steps_taken = step;
    if (remaining > 0) {
        std::ostringstream os;
        os << "t_max = " << t_max << " reached with " << remaining
           << " interior points never arrived (left masked)";
        res.warnings.push_back(os.str());
    }
    if (recross_events > 0) {
        std::ostringstream os;
        os << recross_events << " node-step events where an arrived node turned positive again";
        res.warnings.push_back(os.str());
    }
    double ext = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        if (res.arrived.flags[p]) ext = std::max(ext, res.u.values[p]);
    res.extinction_time = ext;
    return res;
}

ArrivalResult wrap_field(ScalarField u) {
    ArrivalResult res;
    res.arrived = Mask(u.grid, false);
    res.initial_interior = Mask(u.grid, false);
    double ext = 0.0;
    for (std::size_t p = 0; p < u.values.size(); ++p) {
        if (std::isfinite(u.values[p])) {
            res.arrived.flags[p] = 1;
            res.initial_interior.flags[p] = 1;
            ext = std::max(ext, u.values[p]);
        }
    }
    res.extinction_time = ext;
    res.u = std::move(u);
    return res;
}

}  // namespace atl
