#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "atl/errors.hpp"

namespace atl {

// Small fixed-capacity vector/index types; only the first `dim` entries of a
// grid's points are meaningful, the rest stay zero.
using Vec = std::array<double, 3>;
using Idx = std::array<int, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scale(double s, const Vec& a);

// Uniform isotropic Cartesian grid. Index order is row-major with the last
// axis fastest; for dim == 2 the third axis has count 1 and origin 0.
struct GridSpec {
    int dim = 2;
    Vec origin{0.0, 0.0, 0.0};
    double spacing = 1.0;
    Idx counts{1, 1, 1};

    // Cube centered at the origin with a grid node exactly at 0.
    static GridSpec centered_cube(int dim, double spacing, double half_extent);
    // Box centered at the origin, per-axis half extents, node at 0.
    static GridSpec centered_box(int dim, double spacing, const Vec& half_extents);

    void validate() const;  // throws ConfigError

    std::size_t size() const {
        return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
    }
    std::size_t index(const Idx& i) const {
        return (static_cast<std::size_t>(i[0]) * counts[1] + i[1]) * counts[2] + i[2];
    }
    Idx unflatten(std::size_t flat) const {
        Idx i;
        i[2] = static_cast<int>(flat % counts[2]);
        flat /= counts[2];
        i[1] = static_cast<int>(flat % counts[1]);
        i[0] = static_cast<int>(flat / counts[1]);
        return i;
    }
    Vec coord(const Idx& i) const {
        Vec x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) x[a] = origin[a] + spacing * i[a];
        return x;
    }
    bool contains(const Idx& i) const {
        for (int a = 0; a < dim; ++a)
            if (i[a] < 0 || i[a] >= counts[a]) return false;
        return true;
    }
    // True if `i` is at least `margin` cells away from every grid face.
    bool interior(const Idx& i, int margin = 1) const {
        for (int a = 0; a < dim; ++a)
            if (i[a] < margin || i[a] >= counts[a] - margin) return false;
        return true;
    }
    // True if the physical point lies inside the hull spanned by the nodes.
    bool in_hull(const Vec& x) const;

    // Physical extent per axis, (counts-1)*h.
    double extent(int axis) const { return spacing * (counts[axis] - 1); }
    double diameter() const;

    bool operator==(const GridSpec& o) const;
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    std::string label;

    ScalarField() = default;
    ScalarField(const GridSpec& g, std::string lbl, double fill = 0.0);

    double& at(const Idx& i) { return values[grid.index(i)]; }
    double at(const Idx& i) const { return values[grid.index(i)]; }

    // Sample fn(coord) at every node.
    template <typename F>
    static ScalarField sample(const GridSpec& g, std::string lbl, F&& fn) {
        ScalarField f(g, std::move(lbl));
        for (std::size_t p = 0; p < f.values.size(); ++p)
            f.values[p] = fn(g.coord(g.unflatten(p)));
        return f;
    }
};

struct Mask {
    GridSpec grid;
    std::vector<std::uint8_t> flags;

    Mask() = default;
    Mask(const GridSpec& g, bool fill = false);

    bool at(const Idx& i) const { return flags[grid.index(i)] != 0; }
    void set(const Idx& i, bool v) { flags[grid.index(i)] = v ? 1 : 0; }
    std::size_t count() const;
};

}  // namespace atl
