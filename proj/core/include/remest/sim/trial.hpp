#ifndef REMEST_SIM_TRIAL_HPP
#define REMEST_SIM_TRIAL_HPP

#include <functional>
#include <vector>

#include "remest/estimator.hpp"
#include "remest/sim/config.hpp"

namespace remest::sim {

/// One recorded simulation slot.
struct TraceRow {
    std::int64_t trial = 0;
    int k = 0;          // 1-based slot index after burn-in
    int gamma = 0;      // 1 = received
    int tau = 0;        // holding time in force for this slot
    double power = 0.0;
    double gain = 1.0;  // 1 without fading
    double trace_p = 0.0;
    double sq_error = 0.0;  // |x_k - xhat_k|^2 at the remote estimator
    std::string policy;
};

/// Test seams: when set, these replace the channel draw / fading draw for
/// the slot (the corresponding uniforms are then not consumed).
struct TrialOverrides {
    std::function<int(int k, double drop_prob)> force_gamma;
    std::function<double(int k)> force_gain;
};

/// Runs one trial of `horizon` recorded slots (after `burnin` discarded
/// ones) under the given policy. Slot order: plant step, local KF,
/// incremental innovation, gain draw, power, channel draw, estimator
/// update, ack. Deterministic given trial_seed. SupportViolation and other
/// module errors propagate; a trial never swallows them.
std::vector<TraceRow> run_trial(const ExperimentConfig& cfg,
                                const PolicyConfig& policy,
                                std::uint64_t trial_seed,
                                const TrialOverrides* overrides = nullptr);

/// Streaming variant: invokes sink(row) per recorded slot instead of
/// materializing the row vector; `sink` may keep whatever it needs.
void run_trial_stream(const ExperimentConfig& cfg, const PolicyConfig& policy,
                      std::uint64_t trial_seed,
                      const std::function<void(const TraceRow&)>& sink,
                      const TrialOverrides* overrides = nullptr);

/// Extended per-slot record for the statistical validators: the plant
/// state, the sensor-side quantities, and the mirrored parameter pair.
struct SlotSample {
    int k = 0;
    int gamma = 0;
    int tau = 0;
    double power = 0.0;
    double gain = 1.0;
    Vector x;
    Vector local_error;  // x - xhat_s
    Vector eps;          // incremental innovation
    Vector remote_error; // x - xhat (after the update)
    Matrix p;            // estimator covariance after the update
    const PolicyState* policy_state = nullptr;  // valid during the callback
};

/// Full-visibility trial driver used by the validation oracles and tests.
void run_trial_probe(const ExperimentConfig& cfg, const PolicyConfig& policy,
                     std::uint64_t trial_seed,
                     const std::function<void(const SlotSample&)>& probe,
                     const TrialOverrides* overrides = nullptr);

}  // namespace remest::sim

#endif  // REMEST_SIM_TRIAL_HPP
