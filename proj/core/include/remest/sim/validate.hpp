#ifndef REMEST_SIM_VALIDATE_HPP
#define REMEST_SIM_VALIDATE_HPP

#include <map>
#include <string>
#include <vector>

#include "remest/sim/experiments.hpp"
#include "remest/sim/stats.hpp"
#include "remest/sim/trial.hpp"

namespace remest::sim {

struct OracleResult {
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<OracleResult> results;

    bool all_pass() const {
        for (const auto& r : results) {
            if (!r.pass) return false;
        }
        return true;
    }
};

/// Statistics stratified on the holding time, collected from stationary
/// trajectories (after burn-in) until the tau = 1 drop quota is met.
struct ConditionedStats {
    std::map<int, RunningCovariance> eps_on_drop;  // second moment of eps
    std::map<int, RunningCovariance> err_on_drop;  // second moment of x - xhat
    RunningCovariance err_on_receipt{0};
    std::map<int, std::int64_t> drops_at_tau;
    std::map<int, std::int64_t> slots_at_tau;
    RunningCross local_cross{0, 0};     // e^s eps' on tau = 1 drops
    RunningCovariance local_error{0};   // e^s on all slots
    RunningScalar power;                // omega_k on all slots
    RunningScalar trace_p;              // Tr(P_k) on all slots
    RunningScalar sq_error;             // |x - xhat|^2 on all slots
    std::vector<std::vector<double>> eps_coords_tau1;  // support coordinates
    std::int64_t trials_run = 0;
};

/// Runs stationary trials of the given policy until at least
/// `tau1_drop_quota` drops at tau = 1 are seen (or `max_trials` is hit).
/// `tau_max` bounds the tau strata that accumulate matrices.
ConditionedStats collect_conditioned(const ExperimentConfig& cfg,
                                     const PolicyConfig& policy,
                                     std::int64_t tau1_drop_quota,
                                     int tau_max = 3,
                                     std::int64_t max_trials = 5000000,
                                     std::uint64_t stream = kStreamValidate);

/// Full oracle suite for the configured system; statistical oracles run
/// under the budget-optimal policy.
ValidationReport validate(const ExperimentConfig& cfg);

/// Conditional-covariance oracle in isolation: empirical covariance of eps
/// on (gamma = 0, tau = 1) slots against psi_scale * Psi_1. psi_scale != 1
/// is the injected-fault path: the oracle must then fail.
OracleResult gaussianity_covariance_oracle(const ExperimentConfig& cfg,
                                           double psi_scale = 1.0,
                                           std::int64_t tau1_drop_quota = 20000);

std::string format_validation_report(const ValidationReport& report);
void write_validation_report(const ValidationReport& report,
                             const std::string& out_prefix);

}  // namespace remest::sim

#endif  // REMEST_SIM_VALIDATE_HPP
