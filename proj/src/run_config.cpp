#include "atl/run_config.hpp"

#include <fstream>

#include "atl/errors.hpp"
#include "json.hpp"

namespace atl {
namespace {

using nlohmann::json;

Vec vec_from(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || (static_cast<int>(j.size()) != dim && j.size() != 3))
        throw ConfigError(where + " must be an array of " + std::to_string(dim) + " numbers");
    Vec v{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < j.size(); ++a) v[a] = j[a].get<double>();
    return v;
}

json vec_to(const Vec& v, int dim) {
    json j = json::array();
    for (int a = 0; a < dim; ++a) j.push_back(v[a]);
    return j;
}

// Pulls a key out of the object so leftovers can be flagged as unknown.
template <typename T>
void take(json& obj, const char* key, T& into, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        into = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
    obj.erase(it);
}

void take_vec(json& obj, const char* key, Vec& into, int dim, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    into = vec_from(*it, dim, where + "." + std::string(key));
    obj.erase(it);
}

void reject_leftovers(const json& obj, const std::string& where) {
    if (obj.empty()) return;
    throw ConfigError("unknown key '" + obj.begin().key() + "' in " + where);
}

json take_object(json& root, const char* key) {
    const auto it = root.find(key);
    if (it == root.end()) return json::object();
    if (!it->is_object()) throw ConfigError(std::string(key) + " must be an object");
    json obj = std::move(*it);
    root.erase(it);
    return obj;
}

}  // namespace

Placement SurfaceConfig::build_placement() const {
    if (rotation_angle_deg == 0.0 && center[0] == 0.0 && center[1] == 0.0 && center[2] == 0.0)
        return Placement{};
    return dim == 2 ? Placement::rotation_2d(rotation_angle_deg, center)
                    : Placement::rotation_3d(rotation_axis, rotation_angle_deg, center);
}

ImplicitSurface SurfaceConfig::build() const {
    const Placement p = build_placement();
    if (name == "sphere") return ImplicitSurface::sphere(dim, radius, p);
    if (name == "ellipsoid") return ImplicitSurface::ellipsoid(dim, semi_axes, p);
    if (name == "dumbbell")
        return ImplicitSurface::dumbbell(dim, ball_offset, ball_radius, neck_radius, smoothing, p);
    if (name == "torus") return ImplicitSurface::torus(major_radius, minor_radius, p);
    throw ConfigError("unknown surface '" + name + "'");
}

GridSpec GridConfig::build(int dim) const { return GridSpec::centered_box(dim, spacing, half_extents); }

void RunConfig::validate() const {
    if (surface.dim != 2 && surface.dim != 3)
        throw ConfigError("surface.dim must be 2 or 3");
    if (surface.name != "sphere" && surface.name != "ellipsoid" && surface.name != "dumbbell" &&
        surface.name != "torus" && surface.name != "cylinder")
        throw ConfigError("unknown surface '" + surface.name + "'");
    if (surface.name == "torus" && surface.dim != 3) throw ConfigError("torus needs dim 3");
    if (surface.name == "cylinder" &&
        (surface.cylinder_k < 1 || surface.cylinder_k > surface.dim - 1))
        throw ConfigError("cylinder_k must lie in [1, dim-1]");
    if (!(grid.spacing > 0.0)) throw ConfigError("grid.spacing must be positive");
    for (int a = 0; a < surface.dim; ++a)
        if (!(grid.half_extents[a] > 0.0)) throw ConfigError("grid.half_extents must be positive");
    solver.validate();

    if (!game.direction_counts.empty() && game.direction_counts.size() != game.epsilons.size())
        throw ConfigError("game.direction_counts must be empty or match game.epsilons");
    const int floor_m = surface.dim == 2 ? 8 : 32;
    for (double e : game.epsilons)
        if (!(e > 0.0)) throw ConfigError("game.epsilons must be positive");
    for (int m : game.direction_counts)
        if (m < floor_m)
            throw ConfigError("game.direction_counts below the canonical floor (" +
                              std::to_string(floor_m) + " lines)");
    if (game.tol < 0.0 || game.max_iter < 0 || game.value_cap < 0.0)
        throw ConfigError("game.tol, game.max_iter and game.value_cap cannot be negative");

    if (!(analysis.grad_floor > 0.0)) throw ConfigError("analysis.grad_floor must be positive");
    if (!(analysis.critical_threshold_factor > 0.0))
        throw ConfigError("analysis.critical_threshold_factor must be positive");
    if (analysis.critical_exclusion_cells < 0)
        throw ConfigError("analysis.critical_exclusion_cells cannot be negative");
    if (analysis.viscosity_trials < 0) throw ConfigError("analysis.viscosity_trials cannot be negative");
    if (analysis.viscosity_points < 0) throw ConfigError("analysis.viscosity_points cannot be negative");
    if (analysis.viscosity_radius_cells < 1)
        throw ConfigError("analysis.viscosity_radius_cells must be at least 1");
    if (!(analysis.viscosity_tolerance > 0.0))
        throw ConfigError("analysis.viscosity_tolerance must be positive");
    for (double t : analysis.profile_taus)
        if (!(t > 0.0)) throw ConfigError("analysis.profile_taus must be positive");
    if (!(analysis.profile_window_factor > 0.0))
        throw ConfigError("analysis.profile_window_factor must be positive");
    for (int d : analysis.decay_delta_cells)
        if (d < 1) throw ConfigError("analysis.decay_delta_cells must be at least 1");
    if (analysis.blowup_radius_cells < 2)
        throw ConfigError("analysis.blowup_radius_cells must be at least 2");
    if (output.directory.empty()) throw ConfigError("output.directory cannot be empty");
    if (compare.max_radius < 0.0) throw ConfigError("compare.max_radius cannot be negative");
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");

    RunConfig c;

    json s = take_object(root, "surface");
    take(s, "name", c.surface.name, "surface");
    take(s, "dim", c.surface.dim, "surface");
    take(s, "radius", c.surface.radius, "surface");
    take_vec(s, "semi_axes", c.surface.semi_axes, c.surface.dim, "surface");
    take(s, "ball_offset", c.surface.ball_offset, "surface");
    take(s, "ball_radius", c.surface.ball_radius, "surface");
    take(s, "neck_radius", c.surface.neck_radius, "surface");
    take(s, "smoothing", c.surface.smoothing, "surface");
    take(s, "major_radius", c.surface.major_radius, "surface");
    take(s, "minor_radius", c.surface.minor_radius, "surface");
    take(s, "cylinder_k", c.surface.cylinder_k, "surface");
    take_vec(s, "center", c.surface.center, c.surface.dim, "surface");
    take_vec(s, "rotation_axis", c.surface.rotation_axis, 3, "surface");
    take(s, "rotation_angle_deg", c.surface.rotation_angle_deg, "surface");
    reject_leftovers(s, "surface");

    json g = take_object(root, "grid");
    take(g, "spacing", c.grid.spacing, "grid");
    take_vec(g, "half_extents", c.grid.half_extents, c.surface.dim, "grid");
    reject_leftovers(g, "grid");

    json so = take_object(root, "solver");
    take(so, "cfl", c.solver.cfl, "solver");
    take(so, "delta_reg", c.solver.delta_reg, "solver");
    take(so, "t_max", c.solver.t_max, "solver");
    take(so, "redistance_every", c.solver.redistance_every, "solver");
    take(so, "snapshot_times", c.solver.record_snapshots, "solver");
    reject_leftovers(so, "solver");

    json ga = take_object(root, "game");
    take(ga, "epsilons", c.game.epsilons, "game");
    take(ga, "direction_counts", c.game.direction_counts, "game");
    take(ga, "tol", c.game.tol, "game");
    take(ga, "max_iter", c.game.max_iter, "game");
    take(ga, "value_cap", c.game.value_cap, "game");
    take_vec(ga, "probe_point", c.game.probe_point, c.surface.dim, "game");
    reject_leftovers(ga, "game");

    json an = take_object(root, "analysis");
    take(an, "seed", c.analysis.seed, "analysis");
    take(an, "grad_floor", c.analysis.grad_floor, "analysis");
    take(an, "critical_threshold_factor", c.analysis.critical_threshold_factor, "analysis");
    take(an, "critical_exclusion_cells", c.analysis.critical_exclusion_cells, "analysis");
    take(an, "viscosity_trials", c.analysis.viscosity_trials, "analysis");
    take(an, "viscosity_points", c.analysis.viscosity_points, "analysis");
    take(an, "viscosity_radius_cells", c.analysis.viscosity_radius_cells, "analysis");
    take(an, "viscosity_tolerance", c.analysis.viscosity_tolerance, "analysis");
    take(an, "profile_taus", c.analysis.profile_taus, "analysis");
    take(an, "profile_window_factor", c.analysis.profile_window_factor, "analysis");
    take(an, "decay_delta_cells", c.analysis.decay_delta_cells, "analysis");
    take(an, "blowup_radius_cells", c.analysis.blowup_radius_cells, "analysis");
    reject_leftovers(an, "analysis");

    json ou = take_object(root, "output");
    take(ou, "directory", c.output.directory, "output");
    take(ou, "write_csv", c.output.write_csv, "output");
    take(ou, "write_vtk", c.output.write_vtk, "output");
    reject_leftovers(ou, "output");

    json co = take_object(root, "compare");
    take(co, "file_a", c.compare.file_a, "compare");
    take(co, "file_b", c.compare.file_b, "compare");
    take(co, "max_radius", c.compare.max_radius, "compare");
    reject_leftovers(co, "compare");

    reject_leftovers(root, "config");
    c.validate();
    return c;
}

std::string RunConfig::to_json_text() const {
    json root;
    // Every field is emitted, including parameters the chosen surface kind
    // ignores, so that a load of the saved file reproduces the full struct.
    json& s = root["surface"];
    s["name"] = surface.name;
    s["dim"] = surface.dim;
    s["radius"] = surface.radius;
    s["semi_axes"] = vec_to(surface.semi_axes, surface.dim);
    s["ball_offset"] = surface.ball_offset;
    s["ball_radius"] = surface.ball_radius;
    s["neck_radius"] = surface.neck_radius;
    s["smoothing"] = surface.smoothing;
    s["major_radius"] = surface.major_radius;
    s["minor_radius"] = surface.minor_radius;
    s["cylinder_k"] = surface.cylinder_k;
    s["center"] = vec_to(surface.center, surface.dim);
    s["rotation_axis"] = vec_to(surface.rotation_axis, 3);
    s["rotation_angle_deg"] = surface.rotation_angle_deg;

    json& g = root["grid"];
    g["spacing"] = grid.spacing;
    g["half_extents"] = vec_to(grid.half_extents, surface.dim);

    json& so = root["solver"];
    so["cfl"] = solver.cfl;
    so["delta_reg"] = solver.delta_reg;
    so["t_max"] = solver.t_max;
    so["redistance_every"] = solver.redistance_every;
    so["snapshot_times"] = solver.record_snapshots;

    json& ga = root["game"];
    ga["epsilons"] = game.epsilons;
    ga["direction_counts"] = game.direction_counts;
    ga["tol"] = game.tol;
    ga["max_iter"] = game.max_iter;
    ga["value_cap"] = game.value_cap;
    ga["probe_point"] = vec_to(game.probe_point, surface.dim);

    json& an = root["analysis"];
    an["seed"] = analysis.seed;
    an["grad_floor"] = analysis.grad_floor;
    an["critical_threshold_factor"] = analysis.critical_threshold_factor;
    an["critical_exclusion_cells"] = analysis.critical_exclusion_cells;
    an["viscosity_trials"] = analysis.viscosity_trials;
    an["viscosity_points"] = analysis.viscosity_points;
    an["viscosity_radius_cells"] = analysis.viscosity_radius_cells;
    an["viscosity_tolerance"] = analysis.viscosity_tolerance;
    an["profile_taus"] = analysis.profile_taus;
    an["profile_window_factor"] = analysis.profile_window_factor;
    an["decay_delta_cells"] = analysis.decay_delta_cells;
    an["blowup_radius_cells"] = analysis.blowup_radius_cells;

    json& ou = root["output"];
    ou["directory"] = output.directory;
    ou["write_csv"] = output.write_csv;
    ou["write_vtk"] = output.write_vtk;

    json& co = root["compare"];
    co["file_a"] = compare.file_a;
    co["file_b"] = compare.file_b;
    co["max_radius"] = compare.max_radius;

    return root.dump(2) + "\n";
}

void RunConfig::save(const std::string& path) const {
    validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << to_json_text();
    if (!out) throw ConfigError("short write to " + path);
}

}  // namespace atl
