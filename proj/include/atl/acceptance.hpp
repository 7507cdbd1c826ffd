#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "atl/run_config.hpp"

namespace atl {

struct CriterionOutcome {
    int number = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string summary;  // measured-vs-target text for the log line
};

struct AcceptanceManifest {
    std::vector<CriterionOutcome> criteria;
    bool all_pass = false;
    double total_seconds = 0.0;
};

// Runs the whole acceptance suite: expensive fields (disk at two resolutions,
// ball, dumbbell, torus) are solved once and shared across criteria. Prints
// one PASS/FAIL line per criterion to `log` and writes acceptance.json under
// out_dir. All tolerances are pinned here, not in the config; the config only
// supplies the output directory and the random seed. Returns 0 when every
// criterion passes, 4 otherwise.
int run_acceptance(const RunConfig& base, const std::string& out_dir,
                   std::ostream& log, AcceptanceManifest* manifest_out = nullptr);

}  // namespace atl
