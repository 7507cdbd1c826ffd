#include "atl/grid.hpp"

#include <cmath>
#include <sstream>

namespace atl {

double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec scale(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

GridSpec GridSpec::centered_cube(int dim, double spacing, double half_extent) {
    return centered_box(dim, spacing, {half_extent, half_extent, half_extent});
}

GridSpec GridSpec::centered_box(int dim, double spacing, const Vec& half_extents) {
    GridSpec g;
    g.dim = dim;
    g.spacing = spacing;
    for (int a = 0; a < dim; ++a) {
        const int half = static_cast<int>(std::ceil(half_extents[a] / spacing - 1e-12));
        g.counts[a] = 2 * half + 1;
        g.origin[a] = -half * spacing;
    }
    for (int a = dim; a < 3; ++a) {
        g.counts[a] = 1;
        g.origin[a] = 0.0;
    }
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
    if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
    for (int a = 0; a < dim; ++a) {
        if (counts[a] < 5) {
            std::ostringstream os;
            os << "grid counts must be >= 5 per axis (axis " << a << " has " << counts[a] << ")";
            throw ConfigError(os.str());
        }
    }
    for (int a = dim; a < 3; ++a)
        if (counts[a] != 1) throw ConfigError("unused grid axes must have count 1");
}

bool GridSpec::in_hull(const Vec& x) const {
    for (int a = 0; a < dim; ++a) {
        const double lo = origin[a];
        const double hi = origin[a] + extent(a);
        if (x[a] < lo || x[a] > hi) return false;
    }
    return true;
}

double GridSpec::diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += extent(a) * extent(a);
    return std::sqrt(s);
}

bool GridSpec::operator==(const GridSpec& o) const {
    return dim == o.dim && spacing == o.spacing && counts == o.counts && origin == o.origin;
}

ScalarField::ScalarField(const GridSpec& g, std::string lbl, double fill)
    : grid(g), values(g.size(), fill), label(std::move(lbl)) {
    grid.validate();
}

Mask::Mask(const GridSpec& g, bool fill) : grid(g), flags(g.size(), fill ? 1 : 0) {}

std::size_t Mask::count() const {
    std::size_t n = 0;
    for (auto f : flags) n += (f != 0);
    return n;
}

}  // namespace atl
