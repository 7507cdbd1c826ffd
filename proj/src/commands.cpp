#include "atl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "atl/analytic_arrival.hpp"
#include "atl/errors.hpp"
#include "atl/field_io.hpp"
#include "atl/game.hpp"
#include "atl/regularity.hpp"
#include "atl/rng.hpp"
#include "json.hpp"

namespace atl {
namespace {

using nlohmann::json;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("short write to " + path);
}

json grid_json(const GridSpec& g) {
    json j;
    j["dim"] = g.dim;
    j["spacing"] = g.spacing;
    json org = json::array(), cnt = json::array();
    for (int a = 0; a < g.dim; ++a) {
        org.push_back(g.origin[a]);
        cnt.push_back(g.counts[a]);
    }
    j["origin"] = org;
    j["counts"] = cnt;
    return j;
}

json vec_json(const Vec& v, int dim) {
    json j = json::array();
    for (int a = 0; a < dim; ++a) j.push_back(v[a]);
    return j;
}

// Field dump honoring the format flags; returns the written paths.
std::vector<std::string> dump_field(const ScalarField& f, const OutputConfig& oc,
                                    const std::string& out_dir, const std::string& stem) {
    std::vector<std::string> files;
    if (oc.write_csv) {
        files.push_back(join(out_dir, stem + ".csv"));
        write_field_csv(f, files.back());
    }
    if (oc.write_vtk) {
        files.push_back(join(out_dir, stem + ".vtk"));
        write_field_vtk(f, files.back());
    }
    return files;
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::string> cmd_oracle(const RunConfig& c, const std::string& out_dir) {
    c.validate();
    ensure_dir(out_dir);
    const int dim = c.surface.dim;
    AnalyticArrival oracle = [&] {
        if (c.surface.name == "sphere")
            return AnalyticArrival::sphere(dim, c.surface.radius, c.surface.center);
        if (c.surface.name == "cylinder")
            return AnalyticArrival::cylinder(dim, c.surface.cylinder_k,
                                             c.surface.build_placement());
        throw ConfigError("oracle needs surface name sphere or cylinder, got '" +
                          c.surface.name + "'");
    }();
    const GridSpec g = c.grid.build(dim);
    const ScalarField u = oracle.sample(g, "u");
    auto files = dump_field(u, c.output, out_dir, "u");
    if (files.empty()) throw ConfigError("both output formats are disabled");
    return files;
}

std::vector<std::string> cmd_solve(const RunConfig& c, const std::string& out_dir) {
    c.validate();
    ensure_dir(out_dir);
    const ImplicitSurface surface = c.surface.build();
    const GridSpec g = c.grid.build(c.surface.dim);

    std::vector<std::string> files;
    json snaps = json::array();
    int snap_index = 0;
    const SnapshotCallback on_snapshot = [&](double t, const ScalarField& v) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "v_snap_%03d", snap_index);
        for (auto& f : dump_field(v, c.output, out_dir, stem)) files.push_back(std::move(f));
        json s;
        s["index"] = snap_index;
        s["time"] = t;
        snaps.push_back(s);
        ++snap_index;
    };

    const ArrivalResult result = solve_arrival(surface, g, c.solver, on_snapshot);
    for (auto& f : dump_field(result.u, c.output, out_dir, "u")) files.push_back(std::move(f));

    json log;
    log["grid"] = grid_json(g);
    log["surface"] = c.surface.name;
    log["steps_taken"] = result.steps_taken;
    log["extinction_time"] = result.extinction_time;
    log["arrived_nodes"] = [&] {
        std::size_t n = 0;
        for (std::size_t p = 0; p < g.size(); ++p) n += result.arrived.flags[p];
        return n;
    }();
    log["snapshots"] = snaps;
    log["warnings"] = result.warnings;
    log["surface_mean_convexity_warning"] = surface.mean_convexity_warning();
    files.push_back(join(out_dir, "solve_log.json"));
    write_json(log, files.back());
    return files;
}

std::vector<std::string> cmd_game(const RunConfig& c, const std::string& out_dir) {
    c.validate();
    if (c.game.epsilons.empty()) throw ConfigError("game.epsilons is empty");
    ensure_dir(out_dir);
    const ImplicitSurface domain = c.surface.build();
    const GridSpec g = c.grid.build(c.surface.dim);
    if (!g.in_hull(c.game.probe_point)) throw ConfigError("game.probe_point outside the grid");

    std::vector<std::string> files;
    std::string sweep = "epsilon,direction_lines,iterations,converged,inconclusive,"
                        "diverged_nodes,u_at_probe\n";
    json runs = json::array();
    for (std::size_t i = 0; i < c.game.epsilons.size(); ++i) {
        GameOptions o;
        o.epsilon = c.game.epsilons[i];
        o.directions = c.game.direction_counts.empty() ? 0 : c.game.direction_counts[i];
        o.tol = c.game.tol;
        o.max_iter = c.game.max_iter;
        o.value_cap = c.game.value_cap;
        const GameOptions ro = o.resolved(g);
        const GameResult r = solve_game(domain, g, o);

        char stem[32];
        std::snprintf(stem, sizeof stem, "u_eps_%03zu", i);
        for (auto& f : dump_field(r.u_eps, c.output, out_dir, stem)) files.push_back(std::move(f));

        std::size_t diverged = 0;
        for (std::size_t p = 0; p < g.size(); ++p) diverged += r.diverged.flags[p];
        const double u_probe = interpolate(r.u_eps, c.game.probe_point);
        sweep += fmt17(o.epsilon) + ',' + std::to_string(ro.directions) + ',' +
                 std::to_string(r.iterations) + ',' + std::to_string(int(r.converged)) + ',' +
                 std::to_string(int(r.inconclusive)) + ',' + std::to_string(diverged) + ',' +
                 fmt17(u_probe) + '\n';

        json run;
        run["epsilon"] = o.epsilon;
        run["direction_lines"] = ro.directions;
        run["tol"] = ro.tol;
        run["value_cap"] = ro.value_cap;
        run["iterations"] = r.iterations;
        run["converged"] = r.converged;
        run["inconclusive"] = r.inconclusive;
        run["diverged_nodes"] = diverged;
        run["u_at_probe"] = u_probe;
        runs.push_back(run);
    }

    files.push_back(join(out_dir, "game_sweep.csv"));
    {
        std::ofstream out(files.back(), std::ios::binary);
        if (!out) throw ConfigError("cannot open " + files.back() + " for writing");
        out << sweep;
    }
    json log;
    log["grid"] = grid_json(g);
    log["surface"] = c.surface.name;
    log["probe_point"] = vec_json(c.game.probe_point, c.surface.dim);
    log["runs"] = runs;
    files.push_back(join(out_dir, "game_log.json"));
    write_json(log, files.back());
    return files;
}

std::vector<std::string> cmd_analyze(const RunConfig& c, const std::string& field_csv,
                                     const std::string& out_dir) {
    c.validate();
    ensure_dir(out_dir);
    const AnalysisConfig& ac = c.analysis;
    const ArrivalResult result = wrap_field(read_field_csv(field_csv));
    const GridSpec& g = result.u.grid;
    const double h = g.spacing;
    const int dim = g.dim;
    const int n = dim - 1;

    const RegularitySummary summary = summarize_regularity(
        result, ac.grad_floor, ac.critical_threshold_factor, ac.critical_exclusion_cells);

    json warnings = json::array();

    // Viscosity probes need the full comparison ball inside the arrived set.
    const int rc = ac.viscosity_radius_cells;
    const auto ball_usable = [&](const Idx& at) {
        if (!g.interior(at, rc)) return false;
        const int zr = dim == 3 ? rc : 0;
        for (int a = -rc; a <= rc; ++a)
            for (int b = -rc; b <= rc; ++b)
                for (int cc = -zr; cc <= zr; ++cc) {
                    if (a * a + b * b + cc * cc > rc * rc) continue;
                    if (!result.arrived.at(Idx{at[0] + a, at[1] + b, at[2] + cc})) return false;
                }
        return true;
    };

    json visc;
    visc["tolerance"] = ac.viscosity_tolerance;
    visc["trials_per_point"] = ac.viscosity_trials;
    visc["radius_cells"] = rc;
    {
        // Deterministic draw of regular probe nodes.
        std::vector<std::size_t> candidates;
        for (std::size_t p = 0; p < g.size(); ++p) {
            const Idx at = g.unflatten(p);
            if (!ball_usable(at)) continue;
            const Vec gr = gradient_cd(result.u, at);
            const double gn = std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
            if (!(gn >= ac.grad_floor)) continue;
            candidates.push_back(p);
        }
        Rng rng(Rng::mix(ac.seed, 0x70726f6265ull));
        const std::size_t want = std::min<std::size_t>(ac.viscosity_points, candidates.size());
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng.uniform01() * double(candidates.size() - i));
            std::swap(candidates[i], candidates[std::min(j, candidates.size() - 1)]);
        }
        ViscosityReport agg;
        for (std::size_t i = 0; i < want; ++i) {
            const ViscosityReport r =
                check_viscosity(result, g.unflatten(candidates[i]), ac.viscosity_trials, rc,
                                Rng::mix(ac.seed, candidates[i]), ac.viscosity_tolerance);
            agg.tested += r.tested;
            agg.violations += r.violations;
            agg.skipped += r.skipped;
        }
        json jr;
        jr["points"] = want;
        jr["tested"] = agg.tested;
        jr["violations"] = agg.violations;
        jr["skipped"] = agg.skipped;
        visc["regular"] = jr;
    }
    {
        ViscosityReport agg;
        int usable = 0, unusable = 0;
        for (const CriticalPointRecord& cp : summary.critical_points) {
            if (!ball_usable(cp.index)) {
                ++unusable;
                continue;
            }
            ++usable;
            const ViscosityReport r =
                check_viscosity(result, cp.index, ac.viscosity_trials, rc,
                                Rng::mix(ac.seed, g.index(cp.index)), ac.viscosity_tolerance);
            agg.tested += r.tested;
            agg.violations += r.violations;
            agg.skipped += r.skipped;
        }
        json jc;
        jc["points"] = usable;
        jc["points_without_ball"] = unusable;
        jc["tested"] = agg.tested;
        jc["violations"] = agg.violations;
        jc["skipped"] = agg.skipped;
        visc["critical"] = jc;
    }

    json criticals = json::array();
    for (std::size_t ci = 0; ci < summary.critical_points.size(); ++ci) {
        const CriticalPointRecord& cp = summary.critical_points[ci];
        json jc;
        jc["index"] = [&] {
            json a = json::array();
            for (int axis = 0; axis < dim; ++axis) a.push_back(cp.index[axis]);
            return a;
        }();
        jc["location"] = vec_json(cp.location, dim);
        jc["grad_norm"] = cp.grad_norm;
        jc["eigenvalues"] = [&] {
            json a = json::array();
            for (int axis = 0; axis < dim; ++axis) a.push_back(cp.eigen.values[axis]);
            return a;
        }();
        jc["classified_k"] = cp.classified_k;
        jc["spectrum_residual"] = cp.spectrum_residual;
        jc["equation_residual"] = cp.equation_residual_b;

        if (cp.classified_k >= 1) {
            try {
                jc["blowup_exponent"] = blowup_exponent(result, cp, ac.blowup_radius_cells * h);
            } catch (const NumericalError& e) {
                warnings.push_back("critical " + std::to_string(ci) +
                                   ": blowup fit unavailable: " + e.what());
            }
            if (!ac.profile_taus.empty()) {
                try {
                    const auto fits = tangent_flow_profile(result, cp, ac.profile_taus,
                                                          ac.profile_window_factor);
                    json ja = json::array();
                    for (const ProfileFit& f : fits) {
                        json jf;
                        jf["tau"] = f.tau;
                        jf["mean_ratio"] = f.mean_ratio;
                        jf["spread"] = f.spread;
                        jf["points"] = f.points;
                        ja.push_back(jf);
                    }
                    jc["profile_fits"] = ja;
                    jc["profile_expected_ratio"] = std::sqrt(2.0 * cp.classified_k);
                } catch (const NumericalError& e) {
                    warnings.push_back("critical " + std::to_string(ci) +
                                       ": profile fit unavailable: " + e.what());
                }
            }
            if (cp.classified_k < n && !ac.decay_delta_cells.empty()) {
                std::vector<double> deltas;
                for (int cells : ac.decay_delta_cells) deltas.push_back(cells * h);
                try {
                    const auto rows = axis_decay(result, cp, cp.eigen.vectors[dim - 1], deltas);
                    json ja = json::array();
                    for (const AxisDecayRow& r : rows) {
                        json jr;
                        jr["delta"] = r.delta;
                        jr["grad_norm"] = r.grad_norm;
                        jr["ratio"] = r.ratio;
                        ja.push_back(jr);
                    }
                    jc["axis_decay"] = ja;
                } catch (const ContractError& e) {
                    warnings.push_back("critical " + std::to_string(ci) +
                                       ": axis decay unavailable: " + e.what());
                }
            }
        }
        criticals.push_back(jc);
    }

    json report;
    report["grid"] = grid_json(g);
    report["field_file"] = field_csv;
    report["seed"] = ac.seed;
    report["masks"] = [&] {
        json m;
        m["grad_floor"] = ac.grad_floor;
        m["critical_exclusion_cells"] = ac.critical_exclusion_cells;
        return m;
    }();
    report["tolerances"] = [&] {
        json t;
        t["critical_threshold_factor"] = ac.critical_threshold_factor;
        t["viscosity_tolerance"] = ac.viscosity_tolerance;
        return t;
    }();
    report["regular_count"] = summary.regular_count;
    report["classical_residual"] = [&] {
        json q;
        q["median"] = summary.classical.median;
        q["q95"] = summary.classical.q95;
        q["max"] = summary.classical.max;
        q["count"] = summary.classical.count;
        return q;
    }();
    report["pinching"] = [&] {
        json p;
        p["c11_bound"] = summary.pinching.c11_bound;
        p["pinching_max"] = summary.pinching.pinching_max;
        p["sample_count"] = summary.pinching.sample_count;
        return p;
    }();
    report["critical_points"] = criticals;
    report["viscosity"] = visc;
    report["warnings"] = warnings;

    std::vector<std::string> files;
    files.push_back(join(out_dir, "analysis.json"));
    write_json(report, files.back());
    files.push_back(join(out_dir, "critical_points.csv"));
    write_critical_points_csv(summary.critical_points, dim, files.back());
    return files;
}

CompareResult cmd_compare(const RunConfig& c, const std::string& out_dir) {
    c.validate();
    if (c.compare.file_a.empty() || c.compare.file_b.empty())
        throw ConfigError("compare.file_a and compare.file_b are required");
    ensure_dir(out_dir);
    const ScalarField a = read_field_csv(c.compare.file_a);
    const ScalarField b = read_field_csv(c.compare.file_b);
    const GridSpec& g = a.grid;
    if (g.dim != b.grid.dim || g.counts != b.grid.counts)
        throw ConfigError("compared fields live on different grids");
    for (int axis = 0; axis < g.dim; ++axis)
        if (std::abs(g.origin[axis] - b.grid.origin[axis]) > 1e-12 * (1.0 + std::abs(g.origin[axis])))
            throw ConfigError("compared fields live on different grids");
    if (std::abs(g.spacing - b.grid.spacing) > 1e-12 * g.spacing)
        throw ConfigError("compared fields live on different grids");

    CompareResult res;
    double sum_sq = 0.0;
    const double r2 =
        c.compare.max_radius > 0.0 ? c.compare.max_radius * c.compare.max_radius
                                   : std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vec x = g.coord(g.unflatten(p));
        double xx = 0.0;
        for (int axis = 0; axis < g.dim; ++axis) xx += x[axis] * x[axis];
        if (xx > r2) continue;
        const double va = a.values[p], vb = b.values[p];
        if (!std::isfinite(va) || !std::isfinite(vb)) {
            ++res.excluded;
            continue;
        }
        const double d = std::abs(va - vb);
        res.l_inf = std::max(res.l_inf, d);
        sum_sq += d * d;
        ++res.compared;
    }
    if (res.compared == 0) throw ConfigError("comparison region is empty");
    res.l2_rms = std::sqrt(sum_sq / double(res.compared));

    json j;
    j["file_a"] = c.compare.file_a;
    j["file_b"] = c.compare.file_b;
    j["max_radius"] = c.compare.max_radius;
    j["grid"] = grid_json(g);
    j["l_inf"] = res.l_inf;
    j["l2_rms"] = res.l2_rms;
    j["compared"] = res.compared;
    j["excluded"] = res.excluded;
    res.files.push_back(join(out_dir, "compare.json"));
    write_json(j, res.files.back());
    return res;
}

}  // namespace atl
