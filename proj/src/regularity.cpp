#include "atl/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "atl/errors.hpp"
#include "atl/rng.hpp"

namespace atl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Full 3^d block arrived; the caller guarantees interior(1).
bool block_arrived(const ArrivalResult& r, const Idx& i) {
    const int zr = (r.u.grid.dim == 3) ? 1 : 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -zr; c <= zr; ++c)
                if (!r.arrived.at(Idx{i[0] + a, i[1] + b, i[2] + c})) return false;
    return true;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return kNaN;
    const auto n = sorted.size();
    auto r = static_cast<std::size_t>(q * static_cast<double>(n - 1) + 0.5);
    if (r >= n) r = n - 1;
    return sorted[r];
}

}  // namespace

std::vector<CriticalPointRecord> find_critical_points(const ArrivalResult& result,
                                                      double threshold_factor) {
    const GridSpec& g = result.u.grid;
    const double h = g.spacing;
    const double threshold = threshold_factor * h;

    // Gradient norms where the full second-difference block is arrived.
    ScalarField gn(g, "grad_norm", kNaN);
    for (std::size_t p = 0; p < gn.values.size(); ++p) {
        const Idx i = g.unflatten(p);
        if (!g.interior(i, 1) || !block_arrived(result, i)) continue;
        gn.values[p] = norm(gradient_cd(result.u, i));
    }

    std::vector<CriticalPointRecord> out;
    const int zr = (g.dim == 3) ? 1 : 0;
    for (std::size_t p = 0; p < gn.values.size(); ++p) {
        const double v = gn.values[p];
        if (!(v < threshold)) continue;  // also rejects NaN
        const Idx i = g.unflatten(p);
        if (!g.interior(i, 2)) continue;
        bool is_min = true;
        for (int a = -1; a <= 1 && is_min; ++a)
            for (int b = -1; b <= 1 && is_min; ++b)
                for (int c = -zr; c <= zr && is_min; ++c) {
                    if (a == 0 && b == 0 && c == 0) continue;
                    const double w = gn.at(Idx{i[0] + a, i[1] + b, i[2] + c});
                    if (std::isfinite(w) && w < v) is_min = false;
                }
        if (!is_min) continue;

        CriticalPointRecord rec;
        rec.index = i;
        rec.location = g.coord(i);
        rec.grad_norm = v;
        rec.hessian = hessian_cd(result.u, i);
        rec.eigen = eigen_symmetric(rec.hessian, g.dim);
        const Classification cls = classify_critical(rec.hessian, g.dim - 1);
        rec.classified_k = cls.k;
        rec.spectrum_residual = cls.residual;
        rec.equation_residual_b = check_classical(result.u, i, true);
        out.push_back(rec);
    }
    return out;
}

Classification classify_critical(const SymMat& hessian, int n) {
    if (n < 1 || n > 2)
        throw ContractError("classify_critical: n must be 1 or 2, got " + std::to_string(n));
    const int dim = n + 1;
    double scale = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) scale = std::max(scale, std::abs(hessian(a, b)));
    if (!hessian.is_symmetric(1e-9 * std::max(1.0, scale)))
        throw ContractError("classify_critical: hessian is not symmetric");

    const EigenSym eig = eigen_symmetric(hessian, dim);
    int best_k = 0;
    double best_res = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        // Ascending target spectrum: -1/k with multiplicity k+1, then zeros.
        double res = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double target = (i <= k) ? -1.0 / k : 0.0;
            res = std::max(res, std::abs(eig.values[i] - target));
        }
        if (res < best_res) {
            best_res = res;
            best_k = k;
        }
    }
    if (best_res > 0.5 / best_k) return {0, best_res};
    return {best_k, best_res};
}

double check_classical(const ScalarField& u, const Idx& at, bool critical) {
    if (!critical) return std::abs(one_laplacian(u, at, 1e-8) + 1.0);

    const int dim = u.grid.dim;
    const SymMat hm = hessian_cd(u, at);
    const EigenSym eig = eigen_symmetric(hm, dim);
    const double tr = hm.trace(dim);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i)
        best = std::min(best, std::abs(tr - hm.quad(eig.vectors[i], dim) + 1.0));
    return best;
}

ViscosityReport check_viscosity(const ArrivalResult& result, const Idx& at,
                                int trial_count, int radius_cells,
                                std::uint64_t seed, double tolerance) {
    const GridSpec& g = result.u.grid;
    const int d = g.dim;
    const double h = g.spacing;
    if (radius_cells < 1) throw ContractError("check_viscosity: radius_cells < 1");
    if (!g.interior(at, radius_cells))
        throw ContractError("check_viscosity: comparison ball leaves the grid");

    // Discrete ball offsets; every node in it must be arrived.
    std::vector<Idx> ball;
    const int zr = (d == 3) ? radius_cells : 0;
    for (int a = -radius_cells; a <= radius_cells; ++a)
        for (int b = -radius_cells; b <= radius_cells; ++b)
            for (int c = -zr; c <= zr; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                if (a * a + b * b + c * c > radius_cells * radius_cells) continue;
                const Idx q{at[0] + a, at[1] + b, at[2] + c};
                if (!result.arrived.at(q))
                    throw ContractError("check_viscosity: comparison ball exits the arrived set");
                ball.push_back(q);
            }

    const Vec p = gradient_cd(result.u, at);
    const SymMat hm = hessian_cd(result.u, at);
    const double u0 = result.u.at(at);
    const Vec x0 = g.coord(at);
    const double gnorm = norm(p);
    const double eta = h;

    Rng rng(Rng::mix(seed, 0x76697363ull));
    ViscosityReport rep;
    for (int t = 0; t < trial_count; ++t) {
        SymMat s;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                const double v = rng.sym();
                s(a, b) = v;
                s(b, a) = v;
            }
        for (const double sign : {1.0, -1.0}) {
            SymMat q = hm;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) q(a, b) += sign * eta * s(a, b);

            // Touching test: sign of u - phi over the ball, phi the quadratic
            // with gradient p and Hessian q at the center.
            bool le = true, ge = true;
            for (const Idx& y : ball) {
                const Vec dx = sub(g.coord(y), x0);
                const double phi = u0 + dot(p, dx) + 0.5 * q.quad(dx, d);
                const double diff = result.u.at(y) - phi;
                if (diff > 1e-13) le = false;
                if (diff < -1e-13) ge = false;
                if (!le && !ge) break;
            }
            if (!le && !ge) {
                ++rep.skipped;
                continue;
            }
            ++rep.tested;

            bool bad = false;
            if (gnorm > 1e-8) {
                Vec ph = scale(1.0 / gnorm, p);
                const double lhs = q.trace(d) - q.quad(ph, d);
                if (le && lhs < -1.0 - tolerance) bad = true;   // subsolution
                if (ge && lhs > -1.0 + tolerance) bad = true;   // supersolution
            } else {
                const EigenSym eq = eigen_symmetric(q, d);
                const double tr = q.trace(d);
                // max over |v| <= 1 of tr - q(v,v) and min over the same set.
                const double hi = tr - std::min(0.0, eq.values[0]);
                const double lo = tr - std::max(0.0, eq.values[d - 1]);
                if (le && hi < -1.0 - tolerance) bad = true;
                if (ge && lo > -1.0 + tolerance) bad = true;
            }
            if (bad) ++rep.violations;
        }
    }
    return rep;
}

namespace {

// Zero of the 3-point parabola through (-1,um),(0,uc),(1,up) inside [0,1];
// exact for quadratic data, falls back to the secant crossing.
double edge_crossing(double um, double uc, double up, double level) {
    const double c = uc - level;
    const double b = 0.5 * (up - um);
    const double a = 0.5 * (up - 2.0 * uc + um);
    const double linear = (up != uc) ? c / (uc - up) : 0.5;  // secant zero
    if (std::abs(a) < 1e-14 * (std::abs(b) + std::abs(c) + 1e-300)) {
        if (b == 0.0) return 0.5;
        const double t = -c / b;
        return (t >= -1e-9 && t <= 1.0 + 1e-9) ? std::clamp(t, 0.0, 1.0)
                                               : std::clamp(linear, 0.0, 1.0);
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::clamp(linear, 0.0, 1.0);
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    for (const double t : {q / a, (q != 0.0) ? c / q : kNaN})
        if (t >= -1e-9 && t <= 1.0 + 1e-9) return std::clamp(t, 0.0, 1.0);
    return std::clamp(linear, 0.0, 1.0);
}

}  // namespace

std::vector<ProfileFit> tangent_flow_profile(const ArrivalResult& result,
                                             const CriticalPointRecord& p,
                                             const std::vector<double>& taus,
                                             double window_factor) {
    const GridSpec& g = result.u.grid;
    const int d = g.dim;
    const int k = p.classified_k;
    if (k < 1) throw ContractError("tangent_flow_profile: unclassified critical point");
    const double h = g.spacing;
    const double up = result.u.at(p.index);

    // Axis = eigenvectors of the near-zero eigenvalues (the trailing n-k in
    // ascending order); radial distances live in the complement.
    std::vector<Vec> axis;
    for (int i = k + 1; i < d; ++i) axis.push_back(p.eigen.vectors[i]);

    std::vector<ProfileFit> fits;
    for (const double tau : taus) {
        if (!(tau > 0.0)) throw ContractError("tangent_flow_profile: tau must be positive");
        const double level = up - tau;
        const double w = window_factor * std::sqrt(tau);
        const int reach = static_cast<int>(std::ceil(w / h)) + 1;

        std::vector<Vec> radial;
        const int zr = (d == 3) ? reach : 0;
        for (int a = -reach; a <= reach; ++a)
            for (int b = -reach; b <= reach; ++b)
                for (int c = -zr; c <= zr; ++c) {
                    const Idx q{p.index[0] + a, p.index[1] + b, p.index[2] + c};
                    if (!g.interior(q, 1)) continue;
                    if (!result.arrived.at(q)) continue;
                    const double uc = result.u.at(q);
                    for (int ax = 0; ax < d; ++ax) {
                        Idx r = q;
                        ++r[ax];
                        if (!g.contains(r) || !result.arrived.at(r)) continue;
                        const double ur = result.u.at(r);
                        if (!((uc - level) * (ur - level) < 0.0)) continue;
                        Idx m = q;
                        --m[ax];
                        const double um = result.arrived.at(m) ? result.u.at(m) : kNaN;
                        const double t = std::isfinite(um)
                                             ? edge_crossing(um, uc, ur, level)
                                             : (uc - level) / (uc - ur);
                        Vec x = g.coord(q);
                        x[ax] += t * h;
                        Vec dx = sub(x, p.location);
                        if (norm(dx) > w + h) continue;
                        for (const Vec& av : axis) dx = sub(dx, scale(dot(dx, av), av));
                        radial.push_back(dx);
                    }
                }

        if (radial.size() < 10) {
            std::ostringstream os;
            os << "tangent_flow_profile: only " << radial.size()
               << " level samples at tau=" << tau;
            throw NumericalError(os.str());
        }

        // Centroid removal cancels the sub-grid offset of the node-snapped
        // center; the median trim drops crossings from unrelated sheets.
        Vec centroid{0.0, 0.0, 0.0};
        for (const Vec& r : radial) centroid = add(centroid, r);
        centroid = scale(1.0 / static_cast<double>(radial.size()), centroid);
        std::vector<double> dist;
        dist.reserve(radial.size());
        for (const Vec& r : radial) dist.push_back(norm(sub(r, centroid)));
        std::vector<double> srt = dist;
        std::sort(srt.begin(), srt.end());
        const double med = srt[srt.size() / 2];
        std::vector<double> keep;
        keep.reserve(dist.size());
        for (const double r : dist)
            if (!(med > 0.0) || std::abs(r / med - 1.0) <= 0.5) keep.push_back(r);
        if (keep.size() < 10)
            throw NumericalError("tangent_flow_profile: level samples collapse after trim");
        const auto kept = keep.size();
        double sum = 0.0;
        for (const double r : keep) sum += r;
        const double mean = sum / static_cast<double>(kept);
        double var = 0.0;
        for (const double r : keep) var += (r - mean) * (r - mean);
        var /= static_cast<double>(kept);
        const double rt = std::sqrt(tau);
        fits.push_back({tau, mean / rt, std::sqrt(var) / rt, kept});
    }
    return fits;
}

Vec sampled_gradient(const ScalarField& u, const Mask& arrived, const Vec& x) {
    const GridSpec& g = u.grid;
    const int d = g.dim;
    const double h = g.spacing;
    Idx base{0, 0, 0};
    Vec frac{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const double fi = (x[a] - g.origin[a]) / h;
        int ib = static_cast<int>(std::floor(fi));
        ib = std::clamp(ib, 1, g.counts[a] - 3);  // corners need interior(1)
        base[a] = ib;
        frac[a] = std::clamp(fi - ib, 0.0, 1.0);
    }
    Vec out{0.0, 0.0, 0.0};
    const int corners = 1 << d;
    for (int ci = 0; ci < corners; ++ci) {
        Idx node = base;
        double wgt = 1.0;
        for (int a = 0; a < d; ++a) {
            const int bit = (ci >> a) & 1;
            node[a] += bit;
            wgt *= bit ? frac[a] : (1.0 - frac[a]);
        }
        if (wgt == 0.0) continue;
        for (int a = 0; a < d; ++a) {
            Idx hi = node, lo = node;
            ++hi[a];
            --lo[a];
            if (!arrived.at(hi) || !arrived.at(lo) || !arrived.at(node))
                throw ContractError("sampled_gradient: stencil touches unarrived nodes");
        }
        const Vec gc = gradient_cd(u, node);
        out = add(out, scale(wgt, gc));
    }
    return out;
}

std::vector<AxisDecayRow> axis_decay(const ArrivalResult& result,
                                     const CriticalPointRecord& p, const Vec& v,
                                     const std::vector<double>& deltas) {
    const int d = result.u.grid.dim;
    const int n = d - 1;
    const int k = p.classified_k;
    if (k < 1) throw ContractError("axis_decay: unclassified critical point");
    if (k == n) throw ContractError("axis_decay: spherical point has no axis");

    const double vn = norm(v);
    if (vn <= 0.0) throw ContractError("axis_decay: zero direction");
    const Vec vu = scale(1.0 / vn, v);

    double proj2 = 0.0;
    for (int i = k + 1; i < d; ++i) {
        const double c = dot(vu, p.eigen.vectors[i]);
        proj2 += c * c;
    }
    const double angle = std::acos(std::clamp(std::sqrt(proj2), 0.0, 1.0));
    if (angle > 15.0 * M_PI / 180.0 + 1e-12)
        throw ContractError("axis_decay: direction leaves the zero-eigenspace cone");

    std::vector<AxisDecayRow> rows;
    for (const double delta : deltas) {
        if (!(delta > 0.0)) throw ContractError("axis_decay: delta must be positive");
        const Vec x = add(p.location, scale(delta, vu));
        const double gn = norm(sampled_gradient(result.u, result.arrived, x));
        rows.push_back({delta, gn, gn / delta});
    }
    return rows;
}

PinchingReport pinching_and_c11(const ArrivalResult& result, double grad_floor) {
    const GridSpec& g = result.u.grid;
    const int d = g.dim;
    const stencil::View w = stencil::make_view(result.u);

    PinchingReport rep;
    for (std::size_t fp = 0; fp < result.u.values.size(); ++fp) {
        const Idx i = g.unflatten(fp);
        if (!g.interior(i, 1) || !block_arrived(result, i)) continue;
        const auto at = static_cast<std::ptrdiff_t>(fp);
        const Vec gr = stencil::gradient_at(w, at);
        const double gn = norm(gr);
        if (gn < grad_floor) continue;
        const SymMat hm = stencil::hessian_at(w, at);
        rep.c11_bound = std::max(rep.c11_bound, spectral_norm(hm, d));

        // Restriction of the Hessian to the tangent space grad^perp:
        // M = P H P with P = I - n n^T; |A|/H equals its spectral norm.
        const Vec nh = scale(1.0 / gn, gr);
        double hp[3] = {0.0, 0.0, 0.0};  // (H n)_a
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) hp[a] += hm(a, b) * nh[b];
        const double nhn = hm.quad(nh, d);
        SymMat m;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                m(a, b) = hm(a, b) - nh[a] * hp[b] - hp[a] * nh[b] +
                          nh[a] * nh[b] * nhn;
        rep.pinching_max = std::max(rep.pinching_max, spectral_norm(m, d));
        ++rep.sample_count;
    }
    if (rep.sample_count == 0)
        throw NumericalError("pinching_and_c11: empty regular sample set");
    return rep;
}

double blowup_exponent(const ArrivalResult& result, const CriticalPointRecord& p,
                       double sample_radius) {
    const GridSpec& g = result.u.grid;
    const double up = result.u.at(p.index);

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t cnt = 0;
    for (std::size_t fp = 0; fp < result.u.values.size(); ++fp) {
        const Idx i = g.unflatten(fp);
        if (!g.interior(i, 1) || !result.arrived.at(i)) continue;
        if (norm(sub(g.coord(i), p.location)) > sample_radius) continue;
        const Vec gr = gradient_cd(result.u, i);
        if (!std::isfinite(gr[0]) || !std::isfinite(gr[1]) || !std::isfinite(gr[2]))
            continue;
        const double gn = norm(gr);
        const double dv = up - result.u.values[fp];
        if (gn < 1e-14 || dv < 1e-14) continue;
        const double x = std::log(dv);
        const double y = -std::log(gn);  // log(1/|grad u|)
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 20) throw NumericalError("blowup_exponent: fewer than 20 usable samples");
    const double nn = static_cast<double>(cnt);
    const double var = sxx - sx * sx / nn;
    if (var < 1e-20) throw NumericalError("blowup_exponent: degenerate abscissa");
    const double slope = (sxy - sx * sy / nn) / var;
    return -slope;
}

RegularitySummary summarize_regularity(const ArrivalResult& result, double grad_floor,
                                       double threshold_factor, int dist_cells) {
    const GridSpec& g = result.u.grid;
    RegularitySummary s;
    s.h = g.spacing;
    s.critical_points = find_critical_points(result, threshold_factor);
    s.pinching = pinching_and_c11(result, grad_floor);
    s.regular_count = s.pinching.sample_count;

    const double excl = dist_cells * g.spacing - 1e-12;
    const stencil::View w = stencil::make_view(result.u);
    std::vector<double> residuals;
    for (std::size_t fp = 0; fp < result.u.values.size(); ++fp) {
        const Idx i = g.unflatten(fp);
        if (!g.interior(i, 1) || !block_arrived(result, i)) continue;
        const auto at = static_cast<std::ptrdiff_t>(fp);
        if (norm(stencil::gradient_at(w, at)) < grad_floor) continue;
        const Vec x = g.coord(i);
        bool near = false;
        for (const auto& cp : s.critical_points)
            if (norm(sub(x, cp.location)) < excl) {
                near = true;
                break;
            }
        if (near) continue;
        residuals.push_back(std::abs(stencil::one_laplacian_at(w, at, 1e-8) + 1.0));
    }
    std::sort(residuals.begin(), residuals.end());
    s.classical.count = residuals.size();
    if (!residuals.empty()) {
        s.classical.median = quantile(residuals, 0.5);
        s.classical.q95 = quantile(residuals, 0.95);
        s.classical.max = residuals.back();
    }
    return s;
}

}  // namespace atl
