#include "remest/sim/validate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace remest::sim {

namespace {

/// The budget-optimal policy the statistical oracles run under; taken from
/// the config when it carries one, defaulting to budget 5.
PolicyConfig validation_policy(const ExperimentConfig& cfg) {
    for (const PolicyConfig& p : cfg.policies) {
        if (p.kind == PolicyKind::OptimalDataDriven) return p;
    }
    for (const PolicyConfig& p : cfg.policies) {
        if (p.budget > 0.0) return PolicyConfig::optimal(p.budget);
    }
    return PolicyConfig::optimal(5.0);
}

/// Stationary parameter pair of the budget-optimal policy at holding time
/// tau, rebuilt from the recursion (the same table the controller mirrors).
PolicyState optimal_state_at(const SystemModel& model,
                             const ChannelParams& channel, double budget,
                             int tau) {
    Matrix sigma = model.sigma1;
    PolicyState st;
    for (int t = 1; t <= tau; ++t) {
        const int rank = psd::spectral(sigma).rank;
        const PowerSplit sol = solve_power_split(budget, rank, channel);
        st = PolicyState::scaled_pair(t, sigma, sol.lambda, sol.base_power);
        if (t < tau) sigma = sigma_recursion(st.psi, model);
    }
    return st;
}

OracleResult make_result(std::string name, double observed, double expected,
                         double tolerance, std::string note = {}) {
    OracleResult r;
    r.name = std::move(name);
    r.observed = observed;
    r.expected = expected;
    r.tolerance = tolerance;
    r.pass = std::abs(observed - expected) <= tolerance;
    r.note = std::move(note);
    return r;
}

/// Pass when observed <= bound.
OracleResult make_bound_result(std::string name, double observed, double bound,
                               std::string note = {}) {
    OracleResult r;
    r.name = std::move(name);
    r.observed = observed;
    r.expected = 0.0;
    r.tolerance = bound;
    r.pass = observed <= bound;
    r.note = std::move(note);
    return r;
}

}  // namespace

ConditionedStats collect_conditioned(const ExperimentConfig& cfg,
                                     const PolicyConfig& policy,
                                     std::int64_t tau1_drop_quota, int tau_max,
                                     std::int64_t max_trials,
                                     std::uint64_t stream) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.burnin = std::max(cfg.burnin, 50);

    const int n = cfg.model.n;
    ConditionedStats stats;
    stats.local_cross = RunningCross(n, n);
    stats.local_error = RunningCovariance(n);
    stats.err_on_receipt = RunningCovariance(n);

    // Support coordinates of the innovation at tau = 1, for the
    // per-coordinate normality checks.
    const psd::SpectralFactorization sigma1_fact = psd::spectral(cfg.model.sigma1);
    stats.eps_coords_tau1.assign(sigma1_fact.rank, {});

    for (std::int64_t t = 0; t < max_trials; ++t) {
        run_trial_probe(
            run_cfg, policy, derive_seed(cfg.seed, stream, t),
            [&](const SlotSample& s) {
                stats.power.add(s.power);
                stats.trace_p.add(s.p.trace());
                stats.sq_error.add(s.remote_error.squaredNorm());
                stats.local_error.add(s.local_error);
                ++stats.slots_at_tau[s.tau];
                if (s.gamma) {
                    stats.err_on_receipt.add(s.remote_error);
                    return;
                }
                ++stats.drops_at_tau[s.tau];
                if (s.tau > tau_max) return;
                stats.eps_on_drop.try_emplace(s.tau, n);
                stats.err_on_drop.try_emplace(s.tau, n);
                stats.eps_on_drop.at(s.tau).add(s.eps);
                stats.err_on_drop.at(s.tau).add(s.remote_error);
                if (s.tau == 1) {
                    stats.local_cross.add(s.local_error, s.eps);
                    for (int i = 0; i < sigma1_fact.rank; ++i) {
                        stats.eps_coords_tau1[i].push_back(
                            sigma1_fact.u.col(i).dot(s.eps));
                    }
                }
            });
        stats.trials_run = t + 1;
        if (stats.drops_at_tau[1] >= tau1_drop_quota) break;
    }
    return stats;
}

OracleResult gaussianity_covariance_oracle(const ExperimentConfig& cfg,
                                           double psi_scale,
                                           std::int64_t tau1_drop_quota) {
    const PolicyConfig policy = validation_policy(cfg);
    const ConditionedStats stats =
        collect_conditioned(cfg, policy, tau1_drop_quota, 1);
    const PolicyState st1 =
        optimal_state_at(cfg.model, cfg.channel, policy.budget, 1);
    const Matrix expected = psi_scale * st1.psi;
    const double gap =
        max_entry_gap_rel(stats.eps_on_drop.at(1).second_moment(), expected);
    std::ostringstream note;
    note << "samples=" << stats.eps_on_drop.at(1).count()
         << " psi_scale=" << psi_scale;
    return make_bound_result("gaussianity_covariance_tau1", gap, 0.05,
                             note.str());
}

ValidationReport validate(const ExperimentConfig& cfg) {
    ValidationReport report;
    const SystemModel& model = cfg.model;
    const ChannelParams& channel = cfg.channel;
    const PolicyConfig policy = validation_policy(cfg);
    const double budget = policy.budget;

    // ---- analytic oracles ------------------------------------------------
    {
        // Baseline covariance chain: h^tau(pbar) = pbar + Sigma_tau with the
        // unshaped recursion, tau <= 20.
        double worst = 0.0;
        Matrix sigma = model.sigma1;
        for (int tau = 1; tau <= 20; ++tau) {
            const Matrix lhs = iterate_lyapunov(model.pbar, model, tau);
            const Matrix rhs = model.pbar + sigma;
            worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
            sigma = sigma_recursion(sigma, model);
        }
        report.results.push_back(
            make_bound_result("baseline_covariance_chain", worst, 1e-9));
    }
    {
        // Budget tightness of the optimal parameterization, analytic.
        double worst = 0.0;
        for (int tau = 1; tau <= 10; ++tau) {
            const PolicyState st = optimal_state_at(model, channel, budget, tau);
            worst = std::max(worst,
                             std::abs(expected_power(st, channel) - budget));
        }
        report.results.push_back(
            make_bound_result("budget_tightness_analytic", worst, 1e-10));
    }
    {
        // Offline rank table vs the online recursion rank, and constancy
        // past tau = n.
        int mismatches = 0;
        Matrix sigma = model.sigma1;
        for (int tau = 1; tau <= 10; ++tau) {
            const int online = psd::spectral(sigma).rank;
            const int offline = n_tau_offline(model, tau);
            if (online != offline) ++mismatches;
            if (tau >= model.n && offline != n_tau_offline(model, model.n)) {
                ++mismatches;
            }
            const PowerSplit sol = solve_power_split(budget, online, channel);
            sigma = sigma_recursion(sigma / sol.lambda, model);
        }
        report.results.push_back(make_bound_result("rank_table_offline_online",
                                                   mismatches, 0.0));
    }
    {
        // Randomized linear-algebra suite on 200 generated dominance pairs.
        Mt64Source rng(derive_seed(cfg.seed, kStreamValidate, 777));
        double worst_det = 0.0, worst_mp = 0.0;
        int rank_mismatch = 0, dominance_fail = 0;
        for (int i = 0; i < 200; ++i) {
            const int dim = 2 + static_cast<int>(rng.uniform01() * 4.999);
            const int rank = 1 + static_cast<int>(rng.uniform01() * dim * 0.999);
            const psd::DominantPair pair =
                psd::random_dominant_pair(dim, rank, rng);
            if (!psd::check_dominance(pair.sigma, pair.psi).dominant()) {
                ++dominance_fail;
                continue;
            }
            const Matrix phi = psd::phi_matrix(pair.sigma, pair.psi);
            const psd::SpectralFactorization phif = psd::spectral(phi);
            if (phif.rank != rank) ++rank_mismatch;
            const double det_phi = psd::pseudo_det(phif);
            const double det_sigma = psd::pseudo_det(pair.sigma);
            const double det_psi = psd::pseudo_det(pair.psi);
            worst_det = std::max(
                worst_det, std::abs(det_phi - det_sigma / det_psi) / det_phi);
            const Matrix pinv = psd::pseudo_inverse(pair.sigma);
            const double scale = pair.sigma.norm();
            worst_mp = std::max(
                worst_mp,
                (pair.sigma * pinv * pair.sigma - pair.sigma).norm() / scale);
        }
        report.results.push_back(
            make_bound_result("dominance_pair_check", dominance_fail, 0.0));
        report.results.push_back(
            make_bound_result("phi_rank_equality", rank_mismatch, 0.0));
        report.results.push_back(
            make_bound_result("det_product_identity", worst_det, 1e-7));
        report.results.push_back(
            make_bound_result("moore_penrose_axioms", worst_mp, 1e-8));
    }

    // ---- Monte Carlo oracles --------------------------------------------
    const ConditionedStats stats =
        collect_conditioned(cfg, policy, /*tau1_drop_quota=*/100000, 3);

    const PolicyState st1 = optimal_state_at(model, channel, budget, 1);
    {
        const double gap = max_entry_gap_rel(
            stats.eps_on_drop.at(1).second_moment(), st1.psi);
        std::ostringstream note;
        note << "samples=" << stats.eps_on_drop.at(1).count();
        report.results.push_back(make_bound_result("gaussianity_covariance_tau1",
                                                   gap, 0.05, note.str()));
    }
    {
        double worst_ratio = 0.0;
        for (std::size_t i = 0; i < stats.eps_coords_tau1.size(); ++i) {
            std::vector<double> coords = stats.eps_coords_tau1[i];
            const double sigma = std::sqrt(st1.psi_fact.d[i]);
            const double d = ks_statistic_normal(coords, sigma);
            const double crit =
                ks_critical_value(0.01, static_cast<std::int64_t>(coords.size()));
            worst_ratio = std::max(worst_ratio, d / crit);
        }
        report.results.push_back(make_bound_result(
            "gaussianity_normality_tau1", worst_ratio, 1.0,
            "KS statistic over 1% critical value, max across coordinates"));
    }
    {
        const double formula = drop_rate_formula(st1, channel);
        const auto slots = stats.slots_at_tau.at(1);
        const double freq =
            static_cast<double>(stats.drops_at_tau.at(1)) / slots;
        report.results.push_back(make_result(
            "conditional_drop_rate_tau1", freq, formula,
            3.0 * binomial_se(formula, slots)));
    }
    {
        report.results.push_back(make_result("expected_power_empirical",
                                             stats.power.mean(), budget,
                                             0.02 * budget));
    }
    for (int tau = 1; tau <= 3; ++tau) {
        const PolicyState st = optimal_state_at(model, channel, budget, tau);
        const Matrix expected = model.pbar + st.psi;
        const double gap = max_entry_gap_rel(
            stats.err_on_drop.at(tau).second_moment(), expected);
        std::ostringstream name;
        name << "drop_covariance_tau" << tau;
        std::ostringstream note;
        note << "samples=" << stats.err_on_drop.at(tau).count();
        report.results.push_back(
            make_bound_result(name.str(), gap, 0.05, note.str()));
    }
    {
        const double gap = max_entry_gap_rel(
            stats.err_on_receipt.second_moment(), model.pbar);
        std::ostringstream note;
        note << "samples=" << stats.err_on_receipt.count();
        report.results.push_back(
            make_bound_result("receipt_covariance", gap, 0.05, note.str()));
    }
    {
        // Conditional mean of the remote error on tau = 1 drops.
        const Vector mean = stats.err_on_drop.at(1).mean();
        const Vector se = stats.err_on_drop.at(1).mean_se();
        double worst = 0.0;
        for (int i = 0; i < mean.size(); ++i) {
            worst = std::max(worst, std::abs(mean[i]) / se[i]);
        }
        report.results.push_back(make_bound_result(
            "drop_unbiasedness_tau1", worst, 4.0,
            "|mean remote error on drop| in standard errors, max coordinate"));
    }
    {
        const Matrix cross = stats.local_cross.mean();
        const Matrix se = stats.local_cross.se();
        double worst = 0.0;
        for (int i = 0; i < cross.rows(); ++i) {
            for (int j = 0; j < cross.cols(); ++j) {
                worst = std::max(worst, std::abs(cross(i, j)) / se(i, j));
            }
        }
        report.results.push_back(make_bound_result(
            "innovation_orthogonality", worst, 4.0,
            "|mean(e_s eps')| in standard errors, max entry"));
    }
    {
        const Vector mean = stats.local_error.mean();
        const Vector se = stats.local_error.mean_se();
        double worst = 0.0;
        for (int i = 0; i < mean.size(); ++i) {
            worst = std::max(worst, std::abs(mean[i]) / se[i]);
        }
        report.results.push_back(make_bound_result(
            "local_estimator_unbiasedness", worst, 4.0,
            "|mean local error| in standard errors, max coordinate"));
    }
    {
        const double jc = stats.trace_p.mean();
        const double jm = stats.sq_error.mean();
        report.results.push_back(make_bound_result(
            "metric_consistency", std::abs(jc - jm) / jc, 0.05,
            "reported covariance trace vs empirical squared error"));
    }
    return report;
}

std::string format_validation_report(const ValidationReport& report) {
    std::ostringstream os;
    for (const OracleResult& r : report.results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": observed "
           << r.observed;
        if (r.expected != 0.0) os << ", expected " << r.expected;
        os << ", tolerance " << r.tolerance;
        if (!r.note.empty()) os << " (" << r.note << ")";
        os << "\n";
    }
    os << (report.all_pass() ? "all oracles passed" : "ORACLE FAILURES PRESENT")
       << "\n";
    return os.str();
}

void write_validation_report(const ValidationReport& report,
                             const std::string& out_prefix) {
    {
        std::ofstream txt(out_prefix + "_validation.txt");
        if (!txt) throw ConfigError("cannot write " + out_prefix + "_validation.txt");
        txt << format_validation_report(report);
    }
    nlohmann::json j;
    j["all_pass"] = report.all_pass();
    j["oracles"] = nlohmann::json::array();
    for (const OracleResult& r : report.results) {
        j["oracles"].push_back({{"name", r.name},
                                {"observed", r.observed},
                                {"expected", r.expected},
                                {"tolerance", r.tolerance},
                                {"pass", r.pass},
                                {"note", r.note}});
    }
    std::ofstream js(out_prefix + "_validation.json");
    if (!js) throw ConfigError("cannot write " + out_prefix + "_validation.json");
    js << j.dump(2) << "\n";
}

}  // namespace remest::sim
