// remest command line runner: Monte Carlo experiments, budget sweeps,
// fading comparisons, the statistical validation suite, and the offline
// rank table, all driven by one JSON config with flag overrides.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "remest/sim/experiments.hpp"
#include "remest/sim/validate.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::int64_t trials = -1;
    int horizon = -1;
    int burnin = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "output path prefix (overrides config)");
    cmd->add_option("--trials", args.trials, "Monte Carlo trials (overrides config)");
    cmd->add_option("--horizon", args.horizon, "slots per trial (overrides config)");
    cmd->add_option("--burnin", args.burnin, "discarded warm-up slots");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

remest::sim::ExperimentConfig load(const CommonArgs& args) {
    remest::sim::ExperimentConfig cfg = remest::sim::load_config(args.config);
    if (!args.out.empty()) cfg.out = args.out;
    if (args.trials > 0) cfg.trials = args.trials;
    if (args.horizon > 0) cfg.horizon = args.horizon;
    if (args.burnin >= 0) cfg.burnin = args.burnin;
    if (args.seed_set) cfg.seed = args.seed;
    cfg.validate();
    return cfg;
}

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> values;
    std::string token;
    for (char ch : grid + ",") {
        if (ch == ',') {
            if (!token.empty()) values.push_back(std::stod(token));
            token.clear();
        } else {
            token += ch;
        }
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"remest: transmission-power control for remote state estimation"};
    app.require_subcommand(1);

    CommonArgs sim_args, sweep_args, fading_args, validate_args, ranks_args;
    std::string grid_arg;
    int tau_max = 10;

    CLI::App* simulate =
        app.add_subcommand("simulate", "run the configured policies, emit per-k J CSV");
    add_common(simulate, sim_args);

    CLI::App* sweep =
        app.add_subcommand("sweep", "J vs budget grid for the configured policies");
    add_common(sweep, sweep_args);
    sweep->add_option("--grid", grid_arg, "comma-separated budgets (overrides config)");

    CLI::App* fading = app.add_subcommand(
        "fading", "fading comparison: calibrated inversion baseline vs the "
                  "data-driven controller on its per-slot budget");
    add_common(fading, fading_args);

    CLI::App* validate =
        app.add_subcommand("validate", "statistical oracle suite; nonzero exit on failure");
    add_common(validate, validate_args);

    CLI::App* ranks =
        app.add_subcommand("ranks", "offline vs online innovation rank table");
    add_common(ranks, ranks_args);
    ranks->add_option("--tau-max", tau_max, "largest holding time in the table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto cfg = load(sim_args);
            if (cfg.policies.empty()) {
                throw remest::ConfigError("simulate needs a policy in the config");
            }
            const auto curves = remest::sim::monte_carlo_J(cfg);
            const std::string path = cfg.out + "_j.csv";
            remest::sim::write_j_csv(path, cfg.horizon, curves);
            for (const auto& c : curves) {
                std::cout << c.policy << ": J_" << cfg.horizon << " = "
                          << c.final_j() << " (se " << c.final_se()
                          << "), mean power " << c.mean_power << "\n";
            }
            std::cout << "wrote " << path << "\n";
        } else if (sweep->parsed()) {
            auto cfg = load(sweep_args);
            if (cfg.policies.empty()) {
                cfg.policies = {remest::PolicyConfig::optimal(0.0),
                                remest::PolicyConfig::constant_baseline(0.0)};
            }
            std::vector<double> grid =
                grid_arg.empty() ? cfg.sweep : parse_grid(grid_arg);
            if (grid.empty()) {
                for (int b = 1; b <= 10; ++b) grid.push_back(b);
            }
            const auto rows = remest::sim::sweep_budget(cfg, grid);
            const std::string path = cfg.out + "_sweep.csv";
            remest::sim::write_sweep_csv(path, rows);
            std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
        } else if (fading->parsed()) {
            const auto cfg = load(fading_args);
            const auto res = remest::sim::fading_comparison(cfg);
            const std::string agg = cfg.out + "_fading.csv";
            const std::string trace = cfg.out + "_fading_trace.csv";
            remest::sim::write_fading_csv(agg, trace, res);
            std::cout << "calibrated v = " << res.v << " at budget "
                      << res.budget << ", h* = " << res.cutoff << "\n";
            for (const auto& c : res.curves) {
                std::cout << c.policy << ": J_" << cfg.horizon << " = "
                          << c.final_j() << " (se " << c.final_se()
                          << "), mean power " << c.mean_power << "\n";
            }
            std::cout << "wrote " << agg << " and " << trace << "\n";
        } else if (validate->parsed()) {
            const auto cfg = load(validate_args);
            const auto report = remest::sim::validate(cfg);
            std::cout << remest::sim::format_validation_report(report);
            remest::sim::write_validation_report(report, cfg.out);
            std::cout << "wrote " << cfg.out << "_validation.{txt,json}\n";
            return report.all_pass() ? 0 : 1;
        } else if (ranks->parsed()) {
            const auto cfg = load(ranks_args);
            const auto rows = remest::sim::rank_table(cfg, tau_max);
            const std::string path = cfg.out + "_ranks.csv";
            remest::sim::write_ranks_csv(path, rows);
            std::cout << "tau,n_tau_offline,rank_sigma\n";
            for (const auto& r : rows) {
                std::cout << r.tau << "," << r.offline << "," << r.online << "\n";
            }
            std::cout << "wrote " << path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
