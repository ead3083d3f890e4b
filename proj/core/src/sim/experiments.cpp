#include "remest/sim/experiments.hpp"

#include "remest/sim/csv.hpp"
#include "remest/sim/stats.hpp"

namespace remest::sim {

JCurve monte_carlo_J(const ExperimentConfig& cfg, const PolicyConfig& policy,
                     std::uint64_t stream) {
    const int horizon = cfg.horizon;
    std::vector<RunningScalar> acc_cov(horizon), acc_mse(horizon);
    RunningScalar power;

    double sum_tr = 0.0, sum_sq = 0.0;
    for (std::int64_t t = 0; t < cfg.trials; ++t) {
        sum_tr = 0.0;
        sum_sq = 0.0;
        run_trial_stream(cfg, policy, derive_seed(cfg.seed, stream, t),
                         [&](const TraceRow& row) {
                             sum_tr += row.trace_p;
                             sum_sq += row.sq_error;
                             acc_cov[row.k - 1].add(sum_tr / row.k);
                             acc_mse[row.k - 1].add(sum_sq / row.k);
                             power.add(row.power);
                         });
    }

    JCurve curve;
    curve.policy = policy.tag();
    curve.j_cov.resize(horizon);
    curve.j_cov_se.resize(horizon);
    curve.j_mse.resize(horizon);
    curve.j_mse_se.resize(horizon);
    for (int k = 0; k < horizon; ++k) {
        curve.j_cov[k] = acc_cov[k].mean();
        curve.j_cov_se[k] = acc_cov[k].se();
        curve.j_mse[k] = acc_mse[k].mean();
        curve.j_mse_se[k] = acc_mse[k].se();
    }
    curve.mean_power = power.mean();
    return curve;
}

std::vector<JCurve> monte_carlo_J(const ExperimentConfig& cfg) {
    std::vector<JCurve> curves;
    for (const PolicyConfig& p : cfg.policies) {
        curves.push_back(monte_carlo_J(cfg, p, kStreamSimulate));
    }
    return curves;
}

std::vector<SweepRow> sweep_budget(const ExperimentConfig& cfg,
                                   const std::vector<double>& grid) {
    if (cfg.policies.empty()) {
        throw ConfigError("sweep needs at least one configured policy");
    }
    std::vector<SweepRow> rows;
    for (std::size_t bi = 0; bi < grid.size(); ++bi) {
        for (const PolicyConfig& base : cfg.policies) {
            PolicyConfig p = base;
            if (p.kind == PolicyKind::TruncatedInversion ||
                p.kind == PolicyKind::TimeVaryingOptimal) {
                throw ConfigError(
                    "sweep supports constant-budget policies (constant/optimal)");
            }
            p.budget = grid[bi];
            const JCurve c = monte_carlo_J(cfg, p, kStreamSweepBase + bi);
            SweepRow row;
            row.policy = p.tag();
            row.budget = grid[bi];
            row.j = c.final_j();
            row.se = c.final_se();
            row.j_mse = c.final_j_mse();
            row.mean_power = c.mean_power;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

FadingResult fading_comparison(const ExperimentConfig& cfg) {
    if (!cfg.channel.fading) {
        throw FadingNotConfigured("fading comparison needs channel.fading");
    }
    // Pull budget and cutoff from the configured policies when present.
    double budget = 5.0;
    double cutoff = 5.0;
    double v = 0.0;
    for (const PolicyConfig& p : cfg.policies) {
        if (p.kind == PolicyKind::TruncatedInversion ||
            (p.kind == PolicyKind::TimeVaryingOptimal && p.budget_from_inversion)) {
            if (p.inversion_cutoff > 0.0) cutoff = p.inversion_cutoff;
            if (p.inversion_v > 0.0) v = p.inversion_v;
            if (p.budget > 0.0) budget = p.budget;
        } else if (p.budget > 0.0) {
            budget = p.budget;
        }
    }
    if (v <= 0.0) {
        v = calibrate_inversion_v(budget, cfg.channel.fading->mean_gain, cutoff);
    }

    FadingResult res;
    res.budget = budget;
    res.v = v;
    res.cutoff = cutoff;

    const PolicyConfig dd = PolicyConfig::time_varying_inversion(v, cutoff);
    const PolicyConfig inv = PolicyConfig::truncated_inversion(v, cutoff);
    res.curves.push_back(monte_carlo_J(cfg, dd, kStreamFading));
    res.curves.push_back(monte_carlo_J(cfg, inv, kStreamFading));

    // Single-realization replay: one shared trial seed, so both policies
    // face identical gains and identical plant noise.
    const std::uint64_t trace_seed = derive_seed(cfg.seed, kStreamFadingTrace, 0);
    res.trace.resize(cfg.horizon);
    run_trial_stream(cfg, dd, trace_seed, [&](const TraceRow& row) {
        FadingTracePoint& pt = res.trace[row.k - 1];
        pt.k = row.k;
        pt.gain = row.gain;
        pt.power_dd = row.power;
        pt.trace_dd = row.trace_p;
        pt.sqerr_dd = row.sq_error;
        pt.gamma_dd = row.gamma;
    });
    run_trial_stream(cfg, inv, trace_seed, [&](const TraceRow& row) {
        FadingTracePoint& pt = res.trace[row.k - 1];
        pt.power_inv = row.power;
        pt.trace_inv = row.trace_p;
        pt.sqerr_inv = row.sq_error;
        pt.gamma_inv = row.gamma;
    });
    return res;
}

void write_j_csv(const std::string& path, int horizon,
                 const std::vector<JCurve>& curves) {
    CsvWriter csv(path, "remest.jcurve.v1",
                  {"policy", "k", "j_cov", "j_cov_se", "j_mse", "j_mse_se"});
    for (const JCurve& c : curves) {
        for (int k = 1; k <= horizon; ++k) {
            csv.row({c.policy, CsvWriter::num(k), CsvWriter::num(c.j_cov[k - 1]),
                     CsvWriter::num(c.j_cov_se[k - 1]),
                     CsvWriter::num(c.j_mse[k - 1]),
                     CsvWriter::num(c.j_mse_se[k - 1])});
        }
    }
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
    CsvWriter csv(path, "remest.sweep.v1",
                  {"policy", "budget", "j", "se", "j_mse", "mean_power"});
    for (const SweepRow& r : rows) {
        csv.row({r.policy, CsvWriter::num(r.budget), CsvWriter::num(r.j),
                 CsvWriter::num(r.se), CsvWriter::num(r.j_mse),
                 CsvWriter::num(r.mean_power)});
    }
}

void write_fading_csv(const std::string& aggregate_path,
                      const std::string& trace_path, const FadingResult& res) {
    {
        CsvWriter csv(aggregate_path, "remest.fading.v1",
                      {"policy", "budget", "v", "h_star", "j", "se", "j_mse",
                       "mean_power"});
        for (const JCurve& c : res.curves) {
            csv.row({c.policy, CsvWriter::num(res.budget), CsvWriter::num(res.v),
                     CsvWriter::num(res.cutoff), CsvWriter::num(c.final_j()),
                     CsvWriter::num(c.final_se()), CsvWriter::num(c.final_j_mse()),
                     CsvWriter::num(c.mean_power)});
        }
    }
    CsvWriter csv(trace_path, "remest.fading_trace.v1",
                  {"k", "gain", "power_dd", "gamma_dd", "trace_p_dd", "sqerr_dd",
                   "power_inv", "gamma_inv", "trace_p_inv", "sqerr_inv"});
    for (const FadingTracePoint& pt : res.trace) {
        csv.row({CsvWriter::num(pt.k), CsvWriter::num(pt.gain),
                 CsvWriter::num(pt.power_dd), CsvWriter::num(pt.gamma_dd),
                 CsvWriter::num(pt.trace_dd), CsvWriter::num(pt.sqerr_dd),
                 CsvWriter::num(pt.power_inv), CsvWriter::num(pt.gamma_inv),
                 CsvWriter::num(pt.trace_inv), CsvWriter::num(pt.sqerr_inv)});
    }
}

std::vector<RankRow> rank_table(const ExperimentConfig& cfg, int tau_max) {
    double budget = 5.0;
    for (const PolicyConfig& p : cfg.policies) {
        if (p.kind == PolicyKind::OptimalDataDriven) budget = p.budget;
    }
    PowerController controller(PolicyConfig::optimal(budget), cfg.model,
                               cfg.channel);
    std::vector<RankRow> rows;
    const Vector eps0 = Vector::Zero(cfg.model.n);
    for (int tau = 1; tau <= tau_max; ++tau) {
        controller.decide_power(eps0, 1.0, tau);
        RankRow row;
        row.tau = tau;
        row.offline = n_tau_offline(cfg.model, tau);
        row.online = controller.current_n_tau();
        rows.push_back(row);
        controller.advance(0);  // forced drop extends the burst
    }
    return rows;
}

void write_ranks_csv(const std::string& path,
                     const std::vector<RankRow>& rows) {
    CsvWriter csv(path, "remest.ranks.v1", {"tau", "n_tau_offline", "rank_sigma"});
    for (const RankRow& r : rows) {
        csv.row({CsvWriter::num(r.tau), CsvWriter::num(r.offline),
                 CsvWriter::num(r.online)});
    }
}

}  // namespace remest::sim
