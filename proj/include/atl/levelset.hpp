#pragma once

#include <functional>
#include <string>
#include <vector>

#include "atl/grid.hpp"
#include "atl/implicit_surface.hpp"

namespace atl {

struct SolverOptions {
    double cfl = 0.2;          // dt = cfl * h^2, must stay in (0, 0.25]
    double delta_reg = 1e-8;   // gradient regularization
    double t_max = 0.0;        // 0 = auto (2 * grid diameter^2)
    int redistance_every = 0;  // steps between redistancing passes, 0 = never
    std::vector<double> record_snapshots;

    void validate() const;  // throws ConfigError
};

struct ArrivalResult {
    ScalarField u;          // arrival time; NaN where the front never arrived
    Mask arrived;
    Mask initial_interior;  // v(.,0) > 0
    long steps_taken = 0;
    double extinction_time = 0.0;  // max of u over arrived points
    std::vector<std::string> warnings;
};

// One explicit Euler step of v_t = |grad v| div(grad v / |grad v|) in
// 1-Laplacian form. Interior nodes updated, the one-cell rind is frozen.
// dt must be positive and within the stability envelope dt <= h^2 / 4.
// Throws NumericalError on non-finite values, tagging `step_index`.
ScalarField evolve_step(const ScalarField& v, double dt, double delta_reg, long step_index = -1);

// Rebuilds v as a signed distance to its zero crossing (fast sweeping on the
// eikonal equation, first-order). The zero set moves by at most O(h^2).
ScalarField redistance(const ScalarField& v);

using SnapshotCallback = std::function<void(double t, const ScalarField& v)>;

// Runs the flow from v(.,0) = signed distance of `surface` and records each
// node's first sign-change time. Requires the surface inside the hull with at
// least 10% free padding (relative to the surface extent) per axis.
ArrivalResult solve_arrival(const ImplicitSurface& surface, const GridSpec& grid,
                            const SolverOptions& opts, const SnapshotCallback& on_snapshot = {});

// Same flow, but starting from a caller-supplied initial level-set field
// (zero set taken as the initial front; positive side is "inside").
ArrivalResult solve_arrival_from_field(const ScalarField& v0, const SolverOptions& opts,
                                       const SnapshotCallback& on_snapshot = {});

// Wraps an already-computed arrival field (analytic or loaded from disk) so
// the analysis passes can run on it; arrived = finite entries.
ArrivalResult wrap_field(ScalarField u);

}  // namespace atl
