#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atl/game.hpp"
#include "atl/implicit_surface.hpp"
#include "atl/levelset.hpp"

namespace atl {

// Named surface plus rigid placement, buildable from a config file. The
// name "cylinder" is reserved for the analytic arrival oracle (it is not a
// compact implicit surface and only the oracle command accepts it).
struct SurfaceConfig {
    std::string name = "sphere";
    int dim = 2;
    double radius = 1.0;                          // sphere
    Vec semi_axes{1.0, 1.0, 1.0};                 // ellipsoid
    double ball_offset = 0.55, ball_radius = 0.3; // dumbbell
    double neck_radius = 0.13, smoothing = 0.06;
    double major_radius = 1.0, minor_radius = 0.3;  // torus
    int cylinder_k = 1;                             // oracle only
    Vec center{0.0, 0.0, 0.0};
    Vec rotation_axis{0.0, 0.0, 1.0};  // 3D only
    double rotation_angle_deg = 0.0;

    ImplicitSurface build() const;
    Placement build_placement() const;
};

struct GridConfig {
    double spacing = 1.0 / 64.0;
    Vec half_extents{1.25, 1.25, 1.25};

    GridSpec build(int dim) const;
};

// Game sweep: one solve per epsilon. direction_counts is either empty (use
// the per-dimension defaults) or parallel to epsilons; canonical-run floors
// (8 lines in 2D, 32 in 3D) are enforced here, not in the library.
struct GameSweepConfig {
    std::vector<double> epsilons;
    std::vector<int> direction_counts;
    double tol = 0.0;
    long max_iter = 0;
    double value_cap = 0.0;
    Vec probe_point{0.0, 0.0, 0.0};
};

struct AnalysisConfig {
    std::uint64_t seed = 2024;
    double grad_floor = 0.2;
    double critical_threshold_factor = 2.0;
    int critical_exclusion_cells = 3;
    int viscosity_trials = 100;
    int viscosity_points = 50;  // regular nodes probed, on top of criticals
    int viscosity_radius_cells = 2;
    double viscosity_tolerance = 0.05;
    std::vector<double> profile_taus;
    double profile_window_factor = 2.0;
    std::vector<int> decay_delta_cells{32, 16, 8};
    int blowup_radius_cells = 8;
};

struct OutputConfig {
    std::string directory = "out";
    bool write_csv = true;
    bool write_vtk = true;
};

// Comparison inputs for the error-norm table; radius 0 means the whole grid.
struct CompareConfig {
    std::string file_a;
    std::string file_b;
    double max_radius = 0.0;
};

struct RunConfig {
    SurfaceConfig surface;
    GridConfig grid;
    SolverOptions solver;
    GameSweepConfig game;
    AnalysisConfig analysis;
    OutputConfig output;
    CompareConfig compare;

    // Strict load: unknown keys and type mismatches are configuration
    // errors. The loaded value validates and has every default made
    // explicit, so save() after load() reproduces the file byte for byte.
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
    std::string to_json_text() const;
    void validate() const;  // throws ConfigError
};

}  // namespace atl
