#ifndef REMEST_SIM_CONFIG_HPP
#define REMEST_SIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/plant.hpp"
#include "remest/policy.hpp"

namespace remest::sim {

/// Everything one experiment needs. The seed fully determines all
/// randomness: per-trial generators are split from it by counters, so runs
/// are bit-reproducible for a fixed trial-scheduling order.
struct ExperimentConfig {
    SystemModel model;
    ChannelParams channel;
    std::vector<PolicyConfig> policies;
    int horizon = 30;
    std::int64_t trials = 100000;
    std::uint64_t seed = 12345;
    std::vector<double> sweep;  // budget grid for the sweep experiment
    std::string out = "remest";
    int burnin = 0;  // slots discarded before statistics are collected

    void validate() const;
};

/// Loads a JSON config file. Layout:
///
///   {
///     "model":   { "n": 2, "m": 2, "A": [...], "C": [...], "Q": [...],
///                  "R": [...], "Pi0": [...] },      // row-major arrays
///     "channel": { "alpha": 1.0, "n0w": 3.0,
///                  "fading": { "mean_gain": 1.0 } },  // fading optional
///     "policy":  { "kind": "optimal", "budget": 5.0 },
///     "horizon": 30, "trials": 100000, "seed": 12345,
///     "sweep": [1, 2, ...], "out": "runs/paper", "burnin": 0
///   }
///
/// "model" may also be a path to a file holding the model object.
/// "policies" (an array) replaces "policy" for comparison runs.
/// Policy kinds: "constant" (budget), "optimal" (budget),
/// "time_varying" (budget_sequence or budget + h_star/v for inversion-driven
/// budgets), "inversion" (v or budget to calibrate, h_star).
ExperimentConfig load_config(const std::string& path);

/// Parses a model object / file (keys n, m, A, C, Q, R, optional Pi0).
SystemModel load_model(const std::string& path);

}  // namespace remest::sim

#endif  // REMEST_SIM_CONFIG_HPP
