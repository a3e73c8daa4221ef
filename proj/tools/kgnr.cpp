// kgnr — convergence-study harness for the Klein-Gordon equation in the
// weakly relativistic regime.
//
//   kgnr run <config.json>    run one experiment, write results + plot script
//   kgnr list-experiments     show the available experiment kinds
//   kgnr verify               run the acceptance suite
//
// Exit codes: 0 success, 1 configuration error, 2 resolution-guard violation,
// 3 acceptance failure.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "kgnr/acceptance.hpp"
#include "kgnr/harness.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    const kgnr::ExperimentConfig config = kgnr::load_config(config_path);
    std::cout << "experiment: " << kgnr::experiment_name(config.experiment) << "\n";
    const kgnr::ResultTable table = kgnr::run_experiment(config);
    kgnr::write_outputs(table, config);
    for (const auto& row : table.rows) {
        std::printf("  %-24s", row.quantity.c_str());
        if (row.c > 0.0) std::printf(" c=%-6g", row.c);
        if (row.tau > 0.0) std::printf(" tau=%-8g", row.tau);
        std::printf(" value=%-13.6e", row.value);
        if (row.slope) std::printf(" slope=%.3f", *row.slope);
        std::printf("\n");
    }
    std::cout << "wrote results.csv, results.json, plot.gp under '" << config.output_dir << "'\n";
    return 0;
}

int cmd_list() {
    for (const auto& [name, description] : kgnr::experiment_catalog())
        std::printf("%-28s %s\n", name.c_str(), description.c_str());
    return 0;
}

int cmd_verify() {
    const auto results = kgnr::acceptance::run_all(std::cout);
    if (!kgnr::acceptance::all_passed(results)) {
        std::cout << "acceptance: FAILED\n";
        return 3;
    }
    std::cout << "acceptance: all criteria passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic-expansion solvers and convergence studies for the Klein-Gordon "
                 "equation at large wave speed"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    auto* list = app.add_subcommand("list-experiments", "list the available experiment kinds");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (list->parsed()) return cmd_list();
        if (verify->parsed()) return cmd_verify();
    } catch (const kgnr::guard_violation& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return 2;
    } catch (const kgnr::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
