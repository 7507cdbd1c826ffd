#pragma once

#include <vector>

#include "atl/grid.hpp"
#include "atl/implicit_surface.hpp"

namespace atl {

struct GameOptions {
    double epsilon = 0.05;
    int directions = 0;     // direction lines; 0 = auto (16 in 2D, 64 in 3D)
    double tol = 0.0;       // fixed-point stop; 0 = auto (1e-3 * epsilon^2)
    long max_iter = 0;      // 0 = auto (4 * value_cap / epsilon^2)
    double value_cap = 0.0; // divergence sentinel; 0 = auto (10 * diam^2)

    // Fills the auto fields for a concrete grid.
    GameOptions resolved(const GridSpec& g) const;
};

struct GameResult {
    ScalarField u_eps;
    long iterations = 0;
    bool converged = false;
    bool inconclusive = false;  // iteration budget hit without convergence or divergence
    Mask diverged;
};

// Deterministic unit direction lines: equally spaced angles over [0, pi) in
// 2D, a Fibonacci lattice on the upper half-sphere in 3D. Opposite vectors
// are redundant (the max runs over both signs), so only lines are returned.
std::vector<Vec> direction_lines(int dim, int m);

// One sweep of the exit-game value operator
//   T[f](x) = eps^2 + min over lines v of max over sign b of f~(x + b s v)
// with step s = sqrt(2) eps, f~ = 0 outside the domain (exit ends the game)
// and multilinear interpolation inside. Off-domain nodes stay 0.
ScalarField bellman_update(const ScalarField& f, const ImplicitSurface& domain,
                           const GameOptions& opts);

// Monotone value iteration from 0 until the sup-change drops below tol.
// Nodes exceeding value_cap are flagged diverged and frozen at the cap;
// convergence is then judged over the remaining nodes.
GameResult solve_game(const ImplicitSurface& domain, const GridSpec& grid,
                      const GameOptions& opts);

}  // namespace atl
