#include "remest/sim/trial.hpp"

namespace remest::sim {

namespace {

/// (x0, xhat_s0) drawn from the joint stationary law: the estimate and the
/// estimation error are uncorrelated, with covariances X - pbar and pbar.
/// This puts the local filter exactly in steady state at k = 1.
std::pair<Vector, Vector> stationary_init(const SystemModel& model,
                                          RandomSource& rng) {
    Vector z1(model.n), z2(model.n);
    for (int i = 0; i < model.n; ++i) z1[i] = rng.normal();
    for (int i = 0; i < model.n; ++i) z2[i] = rng.normal();
    Vector xhat0 = model.estimate_cov_sqrt * z1;
    Vector x0 = xhat0 + model.pbar_sqrt * z2;
    return {std::move(x0), std::move(xhat0)};
}

}  // namespace

void run_trial_probe(const ExperimentConfig& cfg, const PolicyConfig& policy,
                     std::uint64_t trial_seed,
                     const std::function<void(const SlotSample&)>& probe,
                     const TrialOverrides* overrides) {
    const SystemModel& model = cfg.model;
    Mt64Source rng(trial_seed);

    auto [x, xhat0] = stationary_init(model, rng);
    LocalFilter local = LocalFilter::at_steady_state(model, xhat0);
    RemoteState remote = initial_remote_state(model, xhat0);
    PowerController controller(policy, model, cfg.channel);
    MatrixPowers powers(model.a);

    const int total = cfg.burnin + cfg.horizon;
    SlotSample sample;
    for (int step = 1; step <= total; ++step) {
        auto [x_next, y] = simulate_step(x, model, rng);
        x = std::move(x_next);
        local = kalman_update(local, y, model);

        const int tau = remote.tau;
        const Vector eps =
            incremental_innovation(local.xhat, remote.last_rx, tau, powers);

        double gain = 1.0;
        if (overrides && overrides->force_gain) {
            gain = overrides->force_gain(step);
        } else if (cfg.channel.fading) {
            gain = sample_fading_gain(cfg.channel, rng);
        }

        const double power = controller.decide_power(eps, gain, step);
        int gamma;
        if (overrides && overrides->force_gamma) {
            gamma = overrides->force_gamma(
                step, drop_probability(power, gain, cfg.channel));
        } else {
            gamma = transmit(power, gain, cfg.channel, rng);
        }

        if (gamma) {
            remote = on_receipt(remote, local.xhat, model);
        } else if (controller.data_driven()) {
            remote = on_drop(remote, controller.psi(), model, powers);
        } else {
            remote = on_drop_baseline(remote, model, powers);
        }

        if (step > cfg.burnin) {
            sample.k = step - cfg.burnin;
            sample.gamma = gamma;
            sample.tau = tau;
            sample.power = power;
            sample.gain = gain;
            sample.x = x;
            sample.local_error = x - local.xhat;
            sample.eps = eps;
            sample.remote_error = x - remote.xhat;
            sample.p = remote.p;
            sample.policy_state = &controller.state();
            probe(sample);
        }
        controller.advance(gamma);
    }
}

void run_trial_stream(const ExperimentConfig& cfg, const PolicyConfig& policy,
                      std::uint64_t trial_seed,
                      const std::function<void(const TraceRow&)>& sink,
                      const TrialOverrides* overrides) {
    TraceRow row;
    row.trial = 0;  // the aggregating caller stamps the trial index
    row.policy = policy.tag();
    run_trial_probe(
        cfg, policy, trial_seed,
        [&](const SlotSample& s) {
            row.k = s.k;
            row.gamma = s.gamma;
            row.tau = s.tau;
            row.power = s.power;
            row.gain = s.gain;
            row.trace_p = s.p.trace();
            row.sq_error = s.remote_error.squaredNorm();
            sink(row);
        },
        overrides);
}

std::vector<TraceRow> run_trial(const ExperimentConfig& cfg,
                                const PolicyConfig& policy,
                                std::uint64_t trial_seed,
                                const TrialOverrides* overrides) {
    std::vector<TraceRow> rows;
    rows.reserve(cfg.horizon);
    run_trial_stream(
        cfg, policy, trial_seed,
        [&](const TraceRow& row) { rows.push_back(row); }, overrides);
    return rows;
}

}  // namespace remest::sim
