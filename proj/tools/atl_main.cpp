#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "atl/acceptance.hpp"
#include "atl/commands.hpp"
#include "atl/errors.hpp"
#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("ATL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arrival-time laboratory: solve, play and analyze shrinking fronts"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string field_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (json)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_override, "output directory (overrides the config)");
    };

    CLI::App* oracle = app.add_subcommand("oracle", "sample a closed-form arrival field");
    CLI::App* solve = app.add_subcommand("solve", "run the level-set arrival solver");
    CLI::App* game = app.add_subcommand("game", "value-iterate the exit game over an epsilon list");
    CLI::App* analyze = app.add_subcommand("analyze", "regularity report for a stored field");
    CLI::App* compare = app.add_subcommand("compare", "error norms between two stored fields");
    CLI::App* accept = app.add_subcommand("accept", "run the full acceptance suite");
    for (CLI::App* sub : {oracle, solve, game, analyze, compare, accept}) add_common(sub);
    analyze->add_option("--field", field_path,
                        "arrival field csv (default: <out>/u.csv from a previous solve)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version keep 0, any parse problem is a config error
    }

    apply_thread_cap();
    try {
        const atl::RunConfig cfg = atl::RunConfig::load(config_path);
        const std::string out = out_override.empty() ? cfg.output.directory : out_override;
        if (oracle->parsed()) {
            for (const std::string& f : atl::cmd_oracle(cfg, out)) std::cout << f << "\n";
        } else if (solve->parsed()) {
            for (const std::string& f : atl::cmd_solve(cfg, out)) std::cout << f << "\n";
        } else if (game->parsed()) {
            for (const std::string& f : atl::cmd_game(cfg, out)) std::cout << f << "\n";
        } else if (analyze->parsed()) {
            const std::string field = field_path.empty() ? out + "/u.csv" : field_path;
            for (const std::string& f : atl::cmd_analyze(cfg, field, out)) std::cout << f << "\n";
        } else if (compare->parsed()) {
            const atl::CompareResult r = atl::cmd_compare(cfg, out);
            std::cout << "l_inf " << r.l_inf << "\nl2_rms " << r.l2_rms << "\ncompared "
                      << r.compared << "\nexcluded " << r.excluded << "\n";
        } else if (accept->parsed()) {
            return atl::run_acceptance(cfg, out, std::cout);
        }
    } catch (const atl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const atl::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const atl::ContractError& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
