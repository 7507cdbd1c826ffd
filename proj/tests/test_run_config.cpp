#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "atl/errors.hpp"
#include "atl/run_config.hpp"
#include "doctest.h"

using namespace atl;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("default config saves, reloads and saves to the same bytes") {
    RunConfig c;
    const std::string a = tmp_path("atl_cfg_a.json"), b = tmp_path("atl_cfg_b.json");
    c.save(a);
    const RunConfig r = RunConfig::load(a);
    r.save(b);
    CHECK(slurp(a) == slurp(b));
    CHECK(r.surface.name == "sphere");
    CHECK(r.grid.spacing == c.grid.spacing);
    CHECK(r.solver.cfl == c.solver.cfl);
    CHECK(r.analysis.seed == c.analysis.seed);
}

TEST_CASE("fully populated config reloads field for field") {
    RunConfig c;
    c.surface.name = "dumbbell";
    c.surface.dim = 3;
    c.surface.ball_offset = 0.61;
    c.surface.ball_radius = 0.27;
    c.surface.neck_radius = 0.11;
    c.surface.smoothing = 0.07;
    c.surface.center = Vec{0.1, -0.2, 0.05};
    c.surface.rotation_axis = Vec{0.0, 1.0, 0.0};
    c.surface.rotation_angle_deg = 17.5;
    c.grid.spacing = 1.0 / 48.0;
    c.grid.half_extents = Vec{1.0, 0.5, 0.5};
    c.solver.cfl = 0.15;
    c.solver.delta_reg = 1e-9;
    c.solver.t_max = 0.7;
    c.solver.redistance_every = 25;
    c.solver.record_snapshots = {0.01, 0.05};
    c.game.epsilons = {0.1, 0.05};
    c.game.direction_counts = {32, 96};
    c.game.tol = 1e-7;
    c.game.max_iter = 5000;
    c.game.value_cap = 30.0;
    c.game.probe_point = Vec{0.0, 0.1, 0.0};
    c.analysis.seed = 99;
    c.analysis.grad_floor = 0.25;
    c.analysis.critical_threshold_factor = 1.5;
    c.analysis.critical_exclusion_cells = 4;
    c.analysis.viscosity_trials = 50;
    c.analysis.viscosity_points = 20;
    c.analysis.viscosity_radius_cells = 3;
    c.analysis.viscosity_tolerance = 0.04;
    c.analysis.profile_taus = {0.01, 0.02, 0.04};
    c.analysis.profile_window_factor = 2.5;
    c.analysis.decay_delta_cells = {24, 12, 6};
    c.analysis.blowup_radius_cells = 10;
    c.output.directory = "results";
    c.output.write_vtk = false;
    c.compare.file_a = "x.csv";
    c.compare.file_b = "y.csv";
    c.compare.max_radius = 0.9;

    const std::string path = tmp_path("atl_cfg_full.json");
    c.save(path);
    const RunConfig r = RunConfig::load(path);

    CHECK(r.surface.name == c.surface.name);
    CHECK(r.surface.dim == c.surface.dim);
    CHECK(r.surface.ball_offset == c.surface.ball_offset);
    CHECK(r.surface.smoothing == c.surface.smoothing);
    CHECK(r.surface.center == c.surface.center);
    CHECK(r.surface.rotation_axis == c.surface.rotation_axis);
    CHECK(r.surface.rotation_angle_deg == c.surface.rotation_angle_deg);
    CHECK(r.grid.spacing == c.grid.spacing);
    CHECK(r.grid.half_extents == c.grid.half_extents);
    CHECK(r.solver.cfl == c.solver.cfl);
    CHECK(r.solver.delta_reg == c.solver.delta_reg);
    CHECK(r.solver.t_max == c.solver.t_max);
    CHECK(r.solver.redistance_every == c.solver.redistance_every);
    CHECK(r.solver.record_snapshots == c.solver.record_snapshots);
    CHECK(r.game.epsilons == c.game.epsilons);
    CHECK(r.game.direction_counts == c.game.direction_counts);
    CHECK(r.game.tol == c.game.tol);
    CHECK(r.game.max_iter == c.game.max_iter);
    CHECK(r.game.value_cap == c.game.value_cap);
    CHECK(r.game.probe_point == c.game.probe_point);
    CHECK(r.analysis.seed == c.analysis.seed);
    CHECK(r.analysis.grad_floor == c.analysis.grad_floor);
    CHECK(r.analysis.critical_threshold_factor == c.analysis.critical_threshold_factor);
    CHECK(r.analysis.critical_exclusion_cells == c.analysis.critical_exclusion_cells);
    CHECK(r.analysis.viscosity_trials == c.analysis.viscosity_trials);
    CHECK(r.analysis.viscosity_points == c.analysis.viscosity_points);
    CHECK(r.analysis.viscosity_radius_cells == c.analysis.viscosity_radius_cells);
    CHECK(r.analysis.viscosity_tolerance == c.analysis.viscosity_tolerance);
    CHECK(r.analysis.profile_taus == c.analysis.profile_taus);
    CHECK(r.analysis.profile_window_factor == c.analysis.profile_window_factor);
    CHECK(r.analysis.decay_delta_cells == c.analysis.decay_delta_cells);
    CHECK(r.analysis.blowup_radius_cells == c.analysis.blowup_radius_cells);
    CHECK(r.output.directory == c.output.directory);
    CHECK(r.output.write_csv == c.output.write_csv);
    CHECK(r.output.write_vtk == c.output.write_vtk);
    CHECK(r.compare.file_a == c.compare.file_a);
    CHECK(r.compare.file_b == c.compare.file_b);
    CHECK(r.compare.max_radius == c.compare.max_radius);

    const std::string again = tmp_path("atl_cfg_full2.json");
    r.save(again);
    CHECK(slurp(path) == slurp(again));
}

TEST_CASE("sparse config files get explicit defaults on save") {
    const std::string path = tmp_path("atl_cfg_sparse.json");
    spit(path, "{\"surface\": {\"name\": \"torus\", \"dim\": 3}}\n");
    const RunConfig r = RunConfig::load(path);
    CHECK(r.surface.major_radius == 1.0);
    CHECK(r.solver.cfl == 0.2);
    const std::string out = tmp_path("atl_cfg_sparse_out.json");
    r.save(out);
    const std::string text = slurp(out);
    CHECK(text.find("\"cfl\": 0.2") != std::string::npos);
    CHECK(text.find("\"seed\": 2024") != std::string::npos);
    CHECK(text.find("\"write_vtk\": true") != std::string::npos);
}

TEST_CASE("config loading rejects unknown keys, bad types and bad values") {
    const std::string path = tmp_path("atl_cfg_bad.json");

    spit(path, "{\"surfaces\": {}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"surface\": {\"radiuss\": 1.0}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"grid\": {\"spacing\": \"fine\"}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"surface\": {\"name\": \"torus\", \"dim\": 2}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"surface\": {\"name\": \"blob\"}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"surface\": {\"name\": \"cylinder\", \"dim\": 3, \"cylinder_k\": 3}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"surface\": {\"name\": \"cylinder\", \"dim\": 3, \"cylinder_k\": 2}}");
    CHECK(RunConfig::load(path).surface.cylinder_k == 2);  // oracle-only name loads

    spit(path, "{\"game\": {\"epsilons\": [0.1], \"direction_counts\": [4]}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"game\": {\"epsilons\": [0.1, 0.05], \"direction_counts\": [32]}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"game\": {\"epsilons\": [-0.1]}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "{\"analysis\": {\"viscosity_radius_cells\": 0}}");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    spit(path, "not json at all");
    CHECK_THROWS_AS(RunConfig::load(path), ConfigError);

    CHECK_THROWS_AS(RunConfig::load(tmp_path("atl_cfg_missing_file.json")), ConfigError);
}

TEST_CASE("configs build the surface and grid they describe") {
    RunConfig c;
    c.surface.name = "ellipsoid";
    c.surface.dim = 3;
    c.surface.semi_axes = Vec{0.5, 1.0, 1.0};
    c.surface.rotation_axis = Vec{0.0, 0.0, 1.0};
    c.surface.rotation_angle_deg = 90.0;
    const ImplicitSurface s = c.surface.build();
    CHECK(s.kind() == SurfaceKind::Ellipsoid);
    CHECK(s.dim() == 3);
    // Quarter turn about z maps the short local x-axis onto world y.
    CHECK(s.value(Vec{0.0, 0.45, 0.0}) > 0.0);
    CHECK(s.value(Vec{0.0, 0.55, 0.0}) < 0.0);
    CHECK(s.value(Vec{0.9, 0.0, 0.0}) > 0.0);

    const GridSpec g = c.grid.build(3);
    CHECK(g.dim == 3);
    CHECK(g.counts[0] == 2 * 80 + 1);  // ceil(1.25/h) cells per side at h=1/64

    RunConfig flat;
    flat.surface.dim = 2;
    const GridSpec g2 = flat.grid.build(2);
    CHECK(g2.counts[2] == 1);
    CHECK(g2.origin[2] == 0.0);
}
