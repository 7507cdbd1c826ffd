#include <iostream>

#include "atl/acceptance.hpp"
#include "atl/run_config.hpp"

// Standalone acceptance gate: defaults only, artifacts under the working
// directory. Nonzero exit on any red criterion.
int main() {
    atl::RunConfig cfg;
    cfg.output.directory = "acceptance_out";
    return atl::run_acceptance(cfg, cfg.output.directory, std::cout);
}
