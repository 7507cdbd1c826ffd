#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "atl/commands.hpp"
#include "atl/errors.hpp"
#include "atl/field_io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace atl;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const std::string dir = "itest_out/" + name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    for (std::string line; std::getline(ss, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("oracle command writes a shrinking-tube field matching its closed form") {
    RunConfig cfg;
    cfg.surface.name = "cylinder";
    cfg.surface.dim = 3;
    cfg.surface.cylinder_k = 1;
    cfg.grid.spacing = 1.0 / 8;
    cfg.grid.half_extents = Vec{2.0, 2.0, 2.0};
    const std::string out = fresh_dir("oracle_tube");
    const auto files = cmd_oracle(cfg, out);
    REQUIRE(files.size() == 2);

    // The tube through the z axis reaches radius sqrt(2) one time unit before
    // it collapses, so the node nearest (sqrt(2), 0, 0) carries -1 up to h.
    const auto all = lines_of(slurp(out + "/u.vtk"));
    const int nx = 33, ny = 33;
    REQUIRE(all.size() == 10 + std::size_t(nx) * ny * 33);
    const int i = 27, j = 16, k = 16;  // x = 1.375, y = z = 0
    const double v = std::stod(all[10 + std::size_t(k) * ny * nx + std::size_t(j) * nx + i]);
    CHECK(v == doctest::Approx(-0.9453125).epsilon(1e-13));
    CHECK(std::abs(v - (-1.0)) <= cfg.grid.spacing);

    const ScalarField csv = read_field_csv(out + "/u.csv");
    CHECK(csv.grid.counts[0] == 33);
    CHECK(csv.at(Idx{i, j, k}) == v);
}

TEST_CASE("oracle command samples the shrinking circle with its center at half time") {
    RunConfig cfg;
    cfg.surface.name = "sphere";
    cfg.surface.dim = 2;
    cfg.surface.radius = 1.0;
    cfg.grid.spacing = 1.0 / 16;
    cfg.grid.half_extents = Vec{1.25, 1.25, 1.25};
    const std::string out = fresh_dir("oracle_circle");
    cmd_oracle(cfg, out);
    const ScalarField u = read_field_csv(out + "/u.csv");
    const Idx center{u.grid.counts[0] / 2, u.grid.counts[1] / 2, 0};
    CHECK(u.at(center) == 0.5);
}

TEST_CASE("oracle command rejects degenerate grids and unknown surfaces") {
    RunConfig cfg;
    cfg.surface.name = "sphere";
    cfg.surface.dim = 2;
    cfg.grid.half_extents = Vec{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(cmd_oracle(cfg, fresh_dir("oracle_bad")), ConfigError);

    RunConfig blob;
    blob.surface.name = "blob";
    CHECK_THROWS_AS(cmd_oracle(blob, fresh_dir("oracle_bad")), ConfigError);
}

TEST_CASE("compare reports zeros for identical fields and rejects mismatched grids") {
    GridSpec g = GridSpec::centered_cube(2, 1.0 / 8, 1.0);
    ScalarField f = ScalarField::sample(
        g, "f", [](const Vec& x) { return std::sin(3 * x[0]) + 0.5 * x[1]; });
    const std::string dir = fresh_dir("compare");
    fs::create_directories(dir);
    write_field_csv(f, dir + "/a.csv");
    write_field_csv(f, dir + "/b.csv");

    RunConfig cfg;
    cfg.compare.file_a = dir + "/a.csv";
    cfg.compare.file_b = dir + "/b.csv";
    const CompareResult r = cmd_compare(cfg, dir);
    CHECK(r.l_inf == 0.0);
    CHECK(r.l2_rms == 0.0);
    CHECK(r.compared == g.size());

    GridSpec g2 = GridSpec::centered_cube(2, 1.0 / 16, 1.0);
    write_field_csv(ScalarField::sample(g2, "f", [](const Vec&) { return 1.0; }),
                    dir + "/c.csv");
    cfg.compare.file_b = dir + "/c.csv";
    CHECK_THROWS_AS(cmd_compare(cfg, dir), ConfigError);
}

TEST_CASE("solve then analyze yields a byte-deterministic report over the stored field") {
    RunConfig cfg;
    cfg.surface.name = "sphere";
    cfg.surface.dim = 2;
    cfg.surface.radius = 1.0;
    cfg.grid.spacing = 1.0 / 32;
    cfg.grid.half_extents = Vec{1.25, 1.25, 1.25};
    cfg.output.write_vtk = false;
    const std::string out = fresh_dir("chain");
    cmd_solve(cfg, out);

    const nlohmann::json log = nlohmann::json::parse(slurp(out + "/solve_log.json"));
    CHECK(log.at("extinction_time").get<double>() == doctest::Approx(0.5).epsilon(0.08));
    CHECK(log.at("steps_taken").get<long>() > 100);

    const std::string rep_a = fresh_dir("chain_rep_a");
    const std::string rep_b = fresh_dir("chain_rep_b");
    cmd_analyze(cfg, out + "/u.csv", rep_a);
    cmd_analyze(cfg, out + "/u.csv", rep_b);
    const std::string text = slurp(rep_a + "/analysis.json");
    CHECK(text == slurp(rep_b + "/analysis.json"));

    const nlohmann::json rep = nlohmann::json::parse(text);
    CHECK(rep.at("regular_count").get<std::size_t>() > 1000);
    CHECK(rep.at("classical_residual").at("median").get<double>() <= 0.1);
    CHECK(!rep.at("critical_points").empty());
    CHECK(rep.at("critical_points")[0].at("classified_k").get<int>() == 1);
    CHECK(rep.at("viscosity").at("regular").at("tested").get<int>() > 0);
    CHECK(rep.at("grid").at("spacing").get<double>() == 1.0 / 32);
}

TEST_CASE("game command writes a deterministic sweep table and reload-able fields") {
    RunConfig cfg;
    cfg.surface.name = "sphere";
    cfg.surface.dim = 2;
    cfg.surface.radius = 1.0;
    cfg.grid.spacing = 1.0 / 16;
    cfg.grid.half_extents = Vec{1.25, 1.25, 1.25};
    // Step length sqrt(2)*eps must keep domain-plus-one-move inside the hull.
    cfg.game.epsilons = {0.125};
    cfg.game.direction_counts = {16};
    cfg.output.write_vtk = false;
    const std::string out = fresh_dir("game_a");
    cmd_game(cfg, out);

    const auto rows = lines_of(slurp(out + "/game_sweep.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] ==
          "epsilon,direction_lines,iterations,converged,inconclusive,diverged_nodes,u_at_probe");
    CHECK(rows[1].substr(0, 6) == "0.125,");

    const ScalarField u = read_field_csv(out + "/u_eps_000.csv");
    const Idx center{u.grid.counts[0] / 2, u.grid.counts[1] / 2, 0};
    CHECK(u.at(center) > 0.2);   // walker pays many steps from the middle
    CHECK(u.at(Idx{0, 0, 0}) == 0.0);  // corner is outside the disk

    const std::string out_b = fresh_dir("game_b");
    cmd_game(cfg, out_b);
    CHECK(slurp(out + "/game_sweep.csv") == slurp(out_b + "/game_sweep.csv"));
    CHECK(slurp(out + "/u_eps_000.csv") == slurp(out_b + "/u_eps_000.csv"));
}
