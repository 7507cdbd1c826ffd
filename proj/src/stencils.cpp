#include "atl/stencils.hpp"

#include <sstream>

namespace atl {

namespace {

void require_interior(const ScalarField& f, const Idx& i, const char* op) {
    if (!f.grid.interior(i, 1)) {
        std::ostringstream os;
        os << op << ": index (" << i[0] << "," << i[1] << "," << i[2]
           << ") is not at least one cell inside the grid";
        throw ContractError(os.str());
    }
}

}  // namespace

Vec gradient_cd(const ScalarField& f, const Idx& i) {
    require_interior(f, i, "gradient_cd");
    const auto w = stencil::make_view(f);
    return stencil::gradient_at(w, static_cast<std::ptrdiff_t>(f.grid.index(i)));
}

SymMat hessian_cd(const ScalarField& f, const Idx& i) {
    require_interior(f, i, "hessian_cd");
    const auto w = stencil::make_view(f);
    return stencil::hessian_at(w, static_cast<std::ptrdiff_t>(f.grid.index(i)));
}

double one_laplacian(const ScalarField& f, const Idx& i, double delta_reg) {
    require_interior(f, i, "one_laplacian");
    const auto w = stencil::make_view(f);
    return stencil::one_laplacian_at(w, static_cast<std::ptrdiff_t>(f.grid.index(i)), delta_reg);
}

double interpolate(const ScalarField& f, const Vec& x) {
    const GridSpec& g = f.grid;
    if (!g.in_hull(x)) {
        std::ostringstream os;
        os << "interpolate: point (" << x[0] << "," << x[1] << "," << x[2]
           << ") outside grid hull";
        throw ContractError(os.str());
    }
    Idx base{0, 0, 0};
    Vec t{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        const double s = (x[a] - g.origin[a]) / g.spacing;
        int ib = static_cast<int>(std::floor(s));
        ib = std::clamp(ib, 0, g.counts[a] - 2);
        base[a] = ib;
        t[a] = std::clamp(s - ib, 0.0, 1.0);
    }
    if (g.dim == 2) {
        const double v00 = f.at({base[0], base[1], 0});
        const double v10 = f.at({base[0] + 1, base[1], 0});
        const double v01 = f.at({base[0], base[1] + 1, 0});
        const double v11 = f.at({base[0] + 1, base[1] + 1, 0});
        const double a0 = v00 + t[0] * (v10 - v00);
        const double a1 = v01 + t[0] * (v11 - v01);
        return a0 + t[1] * (a1 - a0);
    }
    double c[2][2];
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            const double v0 = f.at({base[0], base[1] + j, base[2] + k});
            const double v1 = f.at({base[0] + 1, base[1] + j, base[2] + k});
            c[j][k] = v0 + t[0] * (v1 - v0);
        }
    const double b0 = c[0][0] + t[1] * (c[1][0] - c[0][0]);
    const double b1 = c[0][1] + t[1] * (c[1][1] - c[0][1]);
    return b0 + t[2] * (b1 - b0);
}

}  // namespace atl
