#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "atl/grid.hpp"

namespace atl {

// Symmetric d x d matrix, d <= 3; both triangles stored.
struct SymMat {
    std::array<std::array<double, 3>, 3> m{};

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    double trace(int dim) const {
        double t = 0.0;
        for (int a = 0; a < dim; ++a) t += m[a][a];
        return t;
    }
    // g^T M g, accumulated as diag + 2 * upper triangle.
    double quad(const Vec& g, int dim) const {
        double q = 0.0;
        for (int a = 0; a < dim; ++a) q += m[a][a] * g[a] * g[a];
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b) q += 2.0 * m[a][b] * g[a] * g[b];
        return q;
    }
    bool is_symmetric(double tol = 0.0) const {
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (std::abs(m[a][b] - m[b][a]) > tol) return false;
        return true;
    }
};

namespace stencil {

// Raw-buffer kernels shared by the checked ops below and the solver hot loop,
// so both paths produce identical arithmetic. `at` is the flat offset of the
// center node; `stride[a]` the flat stride of axis a.
struct View {
    const double* v;
    std::array<std::ptrdiff_t, 3> stride;
    double h;
    int dim;
};

inline View make_view(const ScalarField& f) {
    const auto& c = f.grid.counts;
    return View{f.values.data(),
                {static_cast<std::ptrdiff_t>(c[1]) * c[2], c[2], 1},
                f.grid.spacing,
                f.grid.dim};
}

inline Vec gradient_at(const View& w, std::ptrdiff_t at) {
    Vec g{0.0, 0.0, 0.0};
    const double inv2h = 1.0 / (2.0 * w.h);
    for (int a = 0; a < w.dim; ++a)
        g[a] = (w.v[at + w.stride[a]] - w.v[at - w.stride[a]]) * inv2h;
    return g;
}

inline SymMat hessian_at(const View& w, std::ptrdiff_t at) {
    SymMat hm;
    const double invh2 = 1.0 / (w.h * w.h);
    const double inv4h2 = 0.25 * invh2;
    const double c = w.v[at];
    for (int a = 0; a < w.dim; ++a) {
        const std::ptrdiff_t sa = w.stride[a];
        hm(a, a) = (w.v[at + sa] - 2.0 * c + w.v[at - sa]) * invh2;
        for (int b = a + 1; b < w.dim; ++b) {
            const std::ptrdiff_t sb = w.stride[b];
            const double cross = (w.v[at + sa + sb] - w.v[at + sa - sb] -
                                  w.v[at - sa + sb] + w.v[at - sa - sb]) *
                                 inv4h2;
            hm(a, b) = cross;
            hm(b, a) = cross;
        }
    }
    return hm;
}

// trace(Hess) - Hess(g,g)/(|g|^2 + delta^2), with the directional term
// blended toward its all-direction mean trace/d as |g| falls below delta.
// Where the gradient vanishes exactly this leaves ((d-1)/d) * trace, which
// reproduces the cone collapse rate at extremal nodes; a pure-trace fallback
// would halve the arrival-cap curvature there. Inactive for |g| >> delta.
inline double one_laplacian_at(const View& w, std::ptrdiff_t at, double delta_reg) {
    const Vec g = gradient_at(w, at);
    const SymMat hm = hessian_at(w, at);
    const double g2 = dot(g, g);
    const double d2 = delta_reg * delta_reg;
    const double tr = hm.trace(w.dim);
    return tr - (hm.quad(g, w.dim) + d2 * tr / w.dim) / (g2 + d2);
}

}  // namespace stencil

// Checked operations; all require the index at least one cell inside the
// grid and throw ContractError otherwise.
Vec gradient_cd(const ScalarField& f, const Idx& i);
SymMat hessian_cd(const ScalarField& f, const Idx& i);
double one_laplacian(const ScalarField& f, const Idx& i, double delta_reg);

// Multilinear interpolation; `x` must lie inside the grid hull.
double interpolate(const ScalarField& f, const Vec& x);

}  // namespace atl
