#pragma once

#include <string>
#include <vector>

#include "atl/run_config.hpp"

namespace atl {

// Pipeline stages behind the command line front end. Each returns the list
// of files it wrote (under out_dir) so callers can chain or report them.
// Errors surface as ConfigError / NumericalError / ContractError and are
// mapped to exit codes by the executable.

// Samples the analytic arrival oracle named by config.surface ("sphere" or
// "cylinder") onto the configured grid.
std::vector<std::string> cmd_oracle(const RunConfig& c, const std::string& out_dir);

// Runs the front evolution for the configured implicit surface and stores
// the arrival field, any requested evolution snapshots, and a run log.
std::vector<std::string> cmd_solve(const RunConfig& c, const std::string& out_dir);

// One exit-game solve per configured epsilon plus the sweep table
// (epsilon against the value at the probe point).
std::vector<std::string> cmd_game(const RunConfig& c, const std::string& out_dir);

// Regularity pass over a stored arrival field: critical point table,
// residual quantiles, viscosity probes, profile and axis-decay fits.
std::vector<std::string> cmd_analyze(const RunConfig& c, const std::string& field_csv,
                                     const std::string& out_dir);

struct CompareResult {
    double l_inf = 0.0;
    double l2_rms = 0.0;
    std::size_t compared = 0;
    std::size_t excluded = 0;  // not finite in at least one input
    std::vector<std::string> files;
};

// Error norms between two stored fields on {|x| <= max_radius} (0 = all).
CompareResult cmd_compare(const RunConfig& c, const std::string& out_dir);

}  // namespace atl
