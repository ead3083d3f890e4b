#ifndef REMEST_SIM_EXPERIMENTS_HPP
#define REMEST_SIM_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "remest/sim/trial.hpp"

namespace remest::sim {

/// Seed-stream identifiers, one per experiment surface. Policies compared
/// within one experiment share trial seeds, so they see identical plant
/// noise and gain realizations.
inline constexpr std::uint64_t kStreamSimulate = 1;
inline constexpr std::uint64_t kStreamSweepBase = 100;  // + budget index
inline constexpr std::uint64_t kStreamFading = 2;
inline constexpr std::uint64_t kStreamFadingTrace = 3;
inline constexpr std::uint64_t kStreamValidate = 4;

/// Per-k averages of the time-averaged covariance trace and of the
/// empirical squared error, with standard errors over trials.
struct JCurve {
    std::string policy;
    std::vector<double> j_cov, j_cov_se;  // index k-1, k = 1..horizon
    std::vector<double> j_mse, j_mse_se;
    double mean_power = 0.0;

    double final_j() const { return j_cov.back(); }
    double final_se() const { return j_cov_se.back(); }
    double final_j_mse() const { return j_mse.back(); }
};

/// Monte Carlo estimate of J_k = (1/k) sum_i Tr(P_i) for one policy.
JCurve monte_carlo_J(const ExperimentConfig& cfg, const PolicyConfig& policy,
                     std::uint64_t stream = kStreamSimulate);

/// All configured policies on shared trial seeds.
std::vector<JCurve> monte_carlo_J(const ExperimentConfig& cfg);

struct SweepRow {
    std::string policy;
    double budget = 0.0;
    double j = 0.0;
    double se = 0.0;
    double j_mse = 0.0;
    double mean_power = 0.0;
};

/// J_horizon for each (policy, budget) pair on the grid; each policy's
/// budget is overridden by the grid value.
std::vector<SweepRow> sweep_budget(const ExperimentConfig& cfg,
                                   const std::vector<double>& grid);

/// One slot of the paired single-realization fading trace.
struct FadingTracePoint {
    int k = 0;
    double gain = 1.0;
    double power_dd = 0.0, trace_dd = 0.0, sqerr_dd = 0.0;
    double power_inv = 0.0, trace_inv = 0.0, sqerr_inv = 0.0;
    int gamma_dd = 0, gamma_inv = 0;
};

struct FadingResult {
    double budget = 0.0;
    double v = 0.0;       // calibrated inversion constant
    double cutoff = 0.0;  // h*
    std::vector<JCurve> curves;  // [0] data-driven (optimal_tv), [1] inversion
    std::vector<FadingTracePoint> trace;
};

/// Rayleigh-fading comparison: truncated inversion calibrated to the
/// budget, and the time-varying optimal controller running on the same
/// per-slot budget.
/// Both aggregate curves and one paired trace on identical gains and noise.
FadingResult fading_comparison(const ExperimentConfig& cfg);

void write_j_csv(const std::string& path, int horizon,
                 const std::vector<JCurve>& curves);
void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);
void write_fading_csv(const std::string& aggregate_path,
                      const std::string& trace_path, const FadingResult& res);

/// Offline n_tau table next to the rank of the online Sigma recursion
/// under the budget-optimal policy along a forced drop burst.
struct RankRow {
    int tau = 0;
    int offline = 0;
    int online = 0;
};
std::vector<RankRow> rank_table(const ExperimentConfig& cfg, int tau_max);
void write_ranks_csv(const std::string& path, const std::vector<RankRow>& rows);

}  // namespace remest::sim

#endif  // REMEST_SIM_EXPERIMENTS_HPP
