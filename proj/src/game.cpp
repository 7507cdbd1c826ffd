#include "atl/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "atl/errors.hpp"
#include "atl/stencils.hpp"

namespace atl {

namespace {

// Displacement per move. The exit-time normalization (epsilon^2 per step)
// balances against the curvature drift only for this step length; see the
// stationary expansion T[f] - f = eps^2 (1 + Delta_1 f) / ... of the
// operator on smooth f.
double step_length(double epsilon) { return std::sqrt(2.0) * epsilon; }

void validate_game(const ImplicitSurface& domain, const GridSpec& grid, const GameOptions& o) {
    grid.validate();
    if (domain.dim() != grid.dim) throw ConfigError("domain/grid dimension mismatch");
    if (!(o.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (o.epsilon < grid.spacing)
        throw ConfigError("epsilon below the grid spacing: game moves would alias "
                          "under interpolation");
    const double inradius = domain.min_feature_size();
    if (o.epsilon >= inradius / 4.0) {
        std::ostringstream os;
        os << "epsilon = " << o.epsilon << " too coarse for domain inradius " << inradius
           << " (need epsilon < inradius/4)";
        throw ConfigError(os.str());
    }
    // A single line is legal (it is the canonical divergence demonstration);
    // canonical-run floors (8 in 2D, 32 in 3D) are enforced at config level.
    if (o.directions < 1) throw ConfigError("need at least one direction line");
    if (!(o.tol > 0.0) || o.max_iter <= 0 || !(o.value_cap > 0.0))
        throw ConfigError("tol, max_iter and value_cap must be positive (use resolved())");

    // Every in-domain point displaced by one move must stay inside the hull.
    const double margin = step_length(o.epsilon);
    Vec he = domain.bounding_half_extents();
    if (!domain.placement().is_identity()) {
        const double B = domain.bounding_radius();
        he = grid.dim == 2 ? vec2(B, B) : vec3(B, B, B);
    }
    const Vec c = domain.placement().center;
    for (int a = 0; a < grid.dim; ++a) {
        const double lo = grid.origin[a], hi = grid.origin[a] + grid.extent(a);
        if (c[a] - he[a] - margin < lo || c[a] + he[a] + margin > hi)
            throw ConfigError("domain plus one game step must fit inside the grid hull");
    }
}

}  // namespace

GameOptions GameOptions::resolved(const GridSpec& g) const {
    GameOptions o = *this;
    if (o.directions == 0) o.directions = g.dim == 2 ? 16 : 64;
    if (o.tol == 0.0) o.tol = 1e-3 * o.epsilon * o.epsilon;
    if (o.value_cap == 0.0) o.value_cap = 10.0 * g.diameter() * g.diameter();
    if (o.max_iter == 0)
        o.max_iter = static_cast<long>(4.0 * o.value_cap / (o.epsilon * o.epsilon)) + 16;
    return o;
}

std::vector<Vec> direction_lines(int dim, int m) {
    if (m <= 0) throw ConfigError("direction count must be positive");
    std::vector<Vec> v;
    v.reserve(static_cast<size_t>(m));
    if (dim == 2) {
        for (int j = 0; j < m; ++j) {
            const double th = M_PI * j / m;
            v.push_back(vec2(std::cos(th), std::sin(th)));
        }
    } else if (dim == 3) {
        // Fibonacci lattice on z in (0, 1]: area-uniform, deterministic.
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < m; ++j) {
            const double z = (j + 0.5) / m;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = ga * j;
            v.push_back(vec3(r * std::cos(th), r * std::sin(th), z));
        }
    } else {
        throw ConfigError("direction lines need dim 2 or 3");
    }
    return v;
}

namespace {

// Game targets sit at a fixed index-space displacement from every node, so
// the interpolation cell offset and the multilinear weights are constants of
// the (direction, sign) pair; a target read is then a handful of weighted
// loads relative to the node's own flat index.
struct MoveStencil {
    std::ptrdiff_t corner[8];  // flat offsets of the cell corners
    double weight[8];
    int corners;
};

std::vector<MoveStencil> build_move_stencils(const GridSpec& g, const std::vector<Vec>& dirs,
                                             double s) {
    const std::ptrdiff_t stride[3] = {static_cast<std::ptrdiff_t>(g.counts[1]) * g.counts[2],
                                      g.counts[2], 1};
    std::vector<MoveStencil> out;
    out.reserve(dirs.size() * 2);
    for (const Vec& v : dirs) {
        for (const double b : {1.0, -1.0}) {
            int di[3] = {0, 0, 0};
            double frac[3] = {0.0, 0.0, 0.0};
            for (int a = 0; a < g.dim; ++a) {
                const double fa = b * s * v[a] / g.spacing;
                di[a] = static_cast<int>(std::floor(fa));
                frac[a] = fa - di[a];
            }
            MoveStencil ms{};
            ms.corners = 1 << g.dim;
            for (int ci = 0; ci < ms.corners; ++ci) {
                std::ptrdiff_t off = 0;
                double w = 1.0;
                for (int a = 0; a < g.dim; ++a) {
                    const int bit = (ci >> a) & 1;
                    off += (di[a] + bit) * stride[a];
                    w *= bit ? frac[a] : (1.0 - frac[a]);
                }
                ms.corner[ci] = off;
                ms.weight[ci] = w;
            }
            out.push_back(ms);
        }
    }
    return out;
}

// The game targets x +- s v are the same points every sweep, so their
// domain membership can be evaluated once and reused across the iteration.
// Layout: node-major, then direction, then sign (+ first).
std::vector<std::uint8_t> target_membership(
    const ImplicitSurface& domain, const std::vector<std::pair<std::size_t, Vec>>& inside,
    const std::vector<Vec>& dirs, double s) {
    const std::size_t m = dirs.size();
    std::vector<std::uint8_t> mem(inside.size() * m * 2);
    const long n_inside = static_cast<long>(inside.size());
#pragma omp parallel for schedule(static)
    for (long ii = 0; ii < n_inside; ++ii) {
        const Vec& x = inside[ii].second;
        std::uint8_t* row = mem.data() + static_cast<std::size_t>(ii) * m * 2;
        for (std::size_t j = 0; j < m; ++j) {
            for (const double b : {1.0, -1.0}) {
                const Vec y{x[0] + b * s * dirs[j][0], x[1] + b * s * dirs[j][1],
                            x[2] + b * s * dirs[j][2]};
                *row++ = domain.value(y) > 0.0 ? 1 : 0;
            }
        }
    }
    return mem;
}

// Shared sweep core: reads f, writes out at the given inside nodes.  NC is
// the cell corner count (4 in 2D, 8 in 3D) so the read unrolls completely.
template <int NC>
void sweep_impl(const ScalarField& f, const GameOptions& o,
                const std::vector<std::pair<std::size_t, Vec>>& inside,
                const std::vector<MoveStencil>& moves,
                const std::vector<std::uint8_t>& membership, ScalarField& out) {
    const double e2 = o.epsilon * o.epsilon;
    const long n_inside = static_cast<long>(inside.size());
    const std::size_t m2 = moves.size();  // two signed moves per direction line
    const double* field = f.values.data();

#pragma omp parallel for schedule(static)
    for (long ii = 0; ii < n_inside; ++ii) {
        const std::size_t p = inside[ii].first;
        const double* at = field + p;
        const std::uint8_t* member = membership.data() + static_cast<std::size_t>(ii) * m2;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m2; j += 2) {
            double worst = 0.0;
            // Exit ends the game: only strictly interior targets carry value.
            if (member[j]) {
                const MoveStencil& ms = moves[j];
                double fy = 0.0;
                for (int ci = 0; ci < NC; ++ci) fy += ms.weight[ci] * at[ms.corner[ci]];
                if (fy > worst) worst = fy;
            }
            if (worst < best && member[j + 1]) {
                const MoveStencil& ms = moves[j + 1];
                double fy = 0.0;
                for (int ci = 0; ci < NC; ++ci) fy += ms.weight[ci] * at[ms.corner[ci]];
                if (fy > worst) worst = fy;
            }
            if (worst < best) best = worst;
        }
        out.values[p] = e2 + best;
    }
}

void sweep(const ScalarField& f, const GameOptions& o,
           const std::vector<std::pair<std::size_t, Vec>>& inside,
           const std::vector<MoveStencil>& moves, const std::vector<std::uint8_t>& membership,
           ScalarField& out) {
    if (f.grid.dim == 2)
        sweep_impl<4>(f, o, inside, moves, membership, out);
    else
        sweep_impl<8>(f, o, inside, moves, membership, out);
}

std::vector<std::pair<std::size_t, Vec>> inside_nodes(const ImplicitSurface& domain,
                                                     const GridSpec& g) {
    std::vector<std::pair<std::size_t, Vec>> inside;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vec x = g.coord(g.unflatten(p));
        if (domain.value(x) > 0.0) inside.emplace_back(p, x);
    }
    return inside;
}

}  // namespace

ScalarField bellman_update(const ScalarField& f, const ImplicitSurface& domain,
                           const GameOptions& opts) {
    const GameOptions o = opts.resolved(f.grid);
    validate_game(domain, f.grid, o);
    for (double v : f.values)
        if (!(v >= 0.0)) throw ContractError("bellman_update needs a nonnegative field");
    const std::vector<Vec> dirs = direction_lines(f.grid.dim, o.directions);
    const auto inside = inside_nodes(domain, f.grid);
    const double s = step_length(o.epsilon);
    const auto membership = target_membership(domain, inside, dirs, s);
    const auto moves = build_move_stencils(f.grid, dirs, s);
    ScalarField out(f.grid, f.label, 0.0);
    sweep(f, o, inside, moves, membership, out);
    return out;
}

GameResult solve_game(const ImplicitSurface& domain, const GridSpec& grid,
                      const GameOptions& opts) {
    const GameOptions o = opts.resolved(grid);
    validate_game(domain, grid, o);
    const std::vector<Vec> dirs = direction_lines(grid.dim, o.directions);
    const auto inside = inside_nodes(domain, grid);
    const double s = step_length(o.epsilon);
    const auto membership = target_membership(domain, inside, dirs, s);
    const auto moves = build_move_stencils(grid, dirs, s);

    GameResult res;
    res.u_eps = ScalarField(grid, "u_eps", 0.0);
    res.diverged = Mask(grid);

    ScalarField cur = res.u_eps, nxt = res.u_eps;
    long iter = 0;
    bool any_diverged = false;
    while (iter < o.max_iter) {
        sweep(cur, o, inside, moves, membership, nxt);
        ++iter;
        double change = 0.0;
        for (const auto& [p, x] : inside) {
            (void)x;
            if (res.diverged.flags[p]) {
                nxt.values[p] = o.value_cap;  // frozen
                continue;
            }
            // The operator is monotone and starts from 0, so iterates never
            // decrease; a violation indicates a numerical fault.
            if (nxt.values[p] < cur.values[p] - 1e-12 * (1.0 + cur.values[p]))
                throw NumericalError("value iteration lost monotonicity");
            if (nxt.values[p] > o.value_cap) {
                res.diverged.flags[p] = 1;
                nxt.values[p] = o.value_cap;
                any_diverged = true;
                continue;
            }
            change = std::max(change, nxt.values[p] - cur.values[p]);
        }
        std::swap(cur.values, nxt.values);
        if (change < o.tol) {
            res.converged = true;
            break;
        }
    }
    res.u_eps.values = std::move(cur.values);
    res.iterations = iter;
    if (!res.converged && !any_diverged) res.inconclusive = true;
    return res;
}

}  // namespace atl
