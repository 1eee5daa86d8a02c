#include "crn/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generalized potential games from mass-action reaction networks"};
    app.require_subcommand(1);

    crn::RunConfig cfg;
    auto add_common = [&cfg](CLI::App* cmd) {
        cmd->add_option("--network", cfg.network,
                        "network file (.crn) or preset name "
                        "(example1, example2, example3, ab, a2b, cycle3)")
            ->required();
        cmd->add_option("--init", cfg.init,
                        "comma-separated positive initial state, or 'preset'");
        cmd->add_option("--t-end", cfg.t_end, "integration horizon");
        cmd->add_option("--step", cfg.step, "integrator step size");
        cmd->add_option("--tol", cfg.tol, "solver/descent tolerance");
        cmd->add_option("--max-iter", cfg.max_iter, "descent iteration cap");
        cmd->add_option("--quadrature-steps", cfg.quadrature_steps,
                        "Simpson intervals for path integrals");
        cmd->add_option("--samples", cfg.samples, "random states for residual checks");
        cmd->add_option("--seed", cfg.seed, "seed for sampled states");
        cmd->add_option("--out-csv", cfg.out_csv, "CSV output path (prefix for compare)");
        cmd->add_option("--out-json", cfg.out_json, "JSON report path (stdout if absent)");
    };

    CLI::App* check = app.add_subcommand(
        "check", "classify the network game and verify the potential identity");
    add_common(check);

    CLI::App* simulate =
        app.add_subcommand("simulate", "integrate the mass-action ODE and track entropy");
    add_common(simulate);

    CLI::App* equilibrate = app.add_subcommand(
        "equilibrate", "solve for the detailed-balanced equilibrium in the class");
    add_common(equilibrate);

    CLI::App* rate = app.add_subcommand(
        "rate", "exponential-decay certificate for a single reversible reaction");
    add_common(rate);

    CLI::App* compare = app.add_subcommand(
        "compare", "run the ODE and the projected descent side by side");
    add_common(compare);
    compare->add_option("--descent", cfg.descent, "descent variant")
        ->check(CLI::IsMember({"potential", "simultaneous"}));

    CLI11_PARSE(app, argc, argv);

    for (const CLI::App* cmd : {check, simulate, equilibrate, rate, compare}) {
        if (cmd->parsed()) {
            cfg.command = cmd->get_name();
            break;
        }
    }
    return crn::run_command(cfg, std::cout, std::cerr);
}
