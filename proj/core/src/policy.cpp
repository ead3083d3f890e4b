#include "remest/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "remest/estimator.hpp"

namespace remest {

namespace {

psd::SpectralFactorization scale_factorization(
    const psd::SpectralFactorization& f, double inv_scale) {
    psd::SpectralFactorization g = f;
    g.d *= inv_scale;
    return g;
}

}  // namespace

std::string PolicyConfig::tag() const {
    switch (kind) {
        case PolicyKind::ConstantBaseline: return "constant";
        case PolicyKind::DataDriven: return "data_driven";
        case PolicyKind::OptimalDataDriven: return "optimal";
        case PolicyKind::TimeVaryingOptimal: return "optimal_tv";
        case PolicyKind::TruncatedInversion: return "inversion";
    }
    return "unknown";
}

PolicyConfig PolicyConfig::constant_baseline(double budget) {
    if (budget < 0.0) throw ConfigError("budget must be nonnegative");
    PolicyConfig c;
    c.kind = PolicyKind::ConstantBaseline;
    c.budget = budget;
    return c;
}

PolicyConfig PolicyConfig::optimal(double budget) {
    if (budget < 0.0) throw ConfigError("budget must be nonnegative");
    PolicyConfig c;
    c.kind = PolicyKind::OptimalDataDriven;
    c.budget = budget;
    return c;
}

PolicyConfig PolicyConfig::data_driven(std::vector<Matrix> psi_schedule,
                                       double base_power) {
    if (base_power < 0.0) throw ConfigError("base power must be nonnegative");
    PolicyConfig c;
    c.kind = PolicyKind::DataDriven;
    c.psi_schedule = std::move(psi_schedule);
    c.base_power = base_power;
    return c;
}

PolicyConfig PolicyConfig::time_varying(std::vector<double> budgets) {
    if (budgets.empty()) throw ConfigError("budget sequence must be nonempty");
    for (double b : budgets) {
        if (b < 0.0) throw ConfigError("per-slot budgets must be nonnegative");
    }
    PolicyConfig c;
    c.kind = PolicyKind::TimeVaryingOptimal;
    c.budget_sequence = std::move(budgets);
    return c;
}

PolicyConfig PolicyConfig::time_varying_inversion(double v, double cutoff) {
    if (!(v >= 0.0) || !(cutoff > 0.0)) {
        throw ConfigError("inversion parameters must satisfy v >= 0, h* > 0");
    }
    PolicyConfig c;
    c.kind = PolicyKind::TimeVaryingOptimal;
    c.budget_from_inversion = true;
    c.inversion_v = v;
    c.inversion_cutoff = cutoff;
    return c;
}

PolicyConfig PolicyConfig::truncated_inversion(double v, double cutoff) {
    if (!(v >= 0.0) || !(cutoff > 0.0)) {
        throw ConfigError("inversion parameters must satisfy v >= 0, h* > 0");
    }
    PolicyConfig c;
    c.kind = PolicyKind::TruncatedInversion;
    c.inversion_v = v;
    c.inversion_cutoff = cutoff;
    return c;
}

PowerSplit solve_power_split(double budget, int n_tau,
                                  const ChannelParams& params, double gain) {
    if (budget < 0.0) throw ConfigError("budget must be nonnegative");
    if (!(gain > 0.0)) throw ConfigError("gain must be positive");
    PowerSplit sol;
    if (n_tau <= 0) {
        // Rank-zero innovation: nothing to shape, spend the budget flat.
        sol.lambda = 1.0;
        sol.base_power = budget;
        return sol;
    }
    const double scale = params.n0w / (params.alpha * gain);
    if (budget > scale) {
        sol.lambda = 1.0 + 2.0 / n_tau;
        sol.base_power = budget - scale;
    } else {
        sol.lambda = 1.0 + 2.0 * budget / (n_tau * scale);
        sol.base_power = 0.0;
    }
    return sol;
}

PolicyState PolicyState::identity_pair(int tau, Matrix sigma) {
    PolicyState st;
    st.tau = tau;
    st.sigma_fact = psd::spectral(sigma);
    st.psi_fact = st.sigma_fact;
    st.sigma = std::move(sigma);
    st.psi = st.sigma;
    st.n_tau = st.sigma_fact.rank;
    st.phi_eigs = Vector::Ones(st.n_tau);
    st.lambda = 1.0;
    return st;
}

PolicyState PolicyState::scaled_pair(int tau, Matrix sigma, double lambda,
                                     double base_power) {
    if (lambda < 1.0) {
        throw DominanceViolation("scaled pair needs lambda >= 1");
    }
    PolicyState st;
    st.tau = tau;
    st.sigma_fact = psd::spectral(sigma);
    st.psi_fact = scale_factorization(st.sigma_fact, 1.0 / lambda);
    st.sigma = std::move(sigma);
    st.psi = st.sigma / lambda;
    st.n_tau = st.sigma_fact.rank;
    st.phi_eigs = Vector::Constant(st.n_tau, lambda);
    st.lambda = lambda;
    st.base_power = base_power;
    return st;
}

PolicyState PolicyState::general_pair(int tau, Matrix sigma, Matrix psi,
                                      double base_power) {
    const Matrix phi = psd::phi_matrix(sigma, psi);  // validates dominance
    PolicyState st;
    st.tau = tau;
    st.sigma_fact = psd::spectral(sigma);
    st.psi_fact = psd::spectral(psi);
    st.sigma = std::move(sigma);
    st.psi = std::move(psi);
    st.n_tau = st.sigma_fact.rank;
    const psd::SpectralFactorization phif = psd::spectral(phi);
    st.phi_eigs = phif.d.head(phif.rank);
    st.lambda = 0.0;
    st.base_power = base_power;
    return st;
}

Matrix sigma_recursion(const Matrix& psi_prev, const SystemModel& model) {
    if (psi_prev.rows() != model.n || psi_prev.cols() != model.n) {
        throw DimensionMismatch("sigma_recursion: Psi dimension mismatch");
    }
    const Matrix s =
        model.a * psi_prev * model.a.transpose() + model.sigma1;
    return 0.5 * (s + s.transpose());
}

double data_driven_power(const Vector& eps, const PolicyState& state, double base_power,
                const ChannelParams& params, double gain) {
    const double norm = eps.norm();
    if (norm > 0.0) {
        const double orth = state.sigma_fact.support_distance(eps);
        if (orth > 1e-6 * norm) {
            std::ostringstream os;
            os << "innovation leaves the support of Sigma_tau: |orth| = "
               << orth << ", |eps| = " << norm;
            throw SupportViolation(os.str());
        }
    }
    const double qf_psi = state.psi_fact.quadform_pinv(eps);
    const double qf_sigma = state.sigma_fact.quadform_pinv(eps);
    const double quad = std::max(0.0, qf_psi - qf_sigma);
    return params.n0w / (2.0 * params.alpha * gain) * quad + base_power;
}

double expected_power(const Matrix& sigma, const Matrix& psi, double base_power,
                      const ChannelParams& params, double gain) {
    const Matrix phi = psd::phi_matrix(sigma, psi);
    const int n_tau = psd::spectral(sigma).rank;
    return params.n0w / (2.0 * params.alpha * gain) * (phi.trace() - n_tau) +
           base_power;
}

double expected_power(const PolicyState& state, const ChannelParams& params,
                      double gain) {
    return params.n0w / (2.0 * params.alpha * gain) *
               (state.phi_eigs.sum() - state.n_tau) +
           state.base_power;
}

double drop_rate_formula(const Matrix& sigma, const Matrix& psi,
                         double base_power, const ChannelParams& params,
                         double gain) {
    const Matrix phi = psd::phi_matrix(sigma, psi);
    const double det_phi = psd::pseudo_det(phi);
    return std::exp(-params.alpha * gain * base_power / params.n0w) /
           std::sqrt(det_phi);
}

double drop_rate_formula(const PolicyState& state, const ChannelParams& params,
                         double gain) {
    if (state.n_tau == 0) {
        return std::exp(-params.alpha * gain * state.base_power / params.n0w);
    }
    double det_phi = 1.0;
    for (int i = 0; i < state.n_tau; ++i) det_phi *= state.phi_eigs[i];
    return std::exp(-params.alpha * gain * state.base_power / params.n0w) /
           std::sqrt(det_phi);
}

int n_tau_offline(const SystemModel& model, int tau) {
    if (tau < 1) throw ConfigError("n_tau_offline needs tau >= 1");
    const Matrix diff = iterate_lyapunov(model.pbar, model, tau) - model.pbar;
    return psd::spectral(0.5 * (diff + diff.transpose())).rank;
}

double truncated_inversion_power(double gain, double v, double cutoff) {
    if (gain < 0.0) throw ConfigError("gain must be nonnegative");
    if (!(v > 0.0) || !(cutoff > 0.0)) {
        throw ConfigError("inversion parameters must satisfy v > 0, h* > 0");
    }
    return gain > cutoff ? v / gain : v / cutoff;
}

double expected_inversion_power(double v, double mean_gain, double cutoff) {
    if (!(mean_gain > 0.0) || !(cutoff > 0.0)) {
        throw ConfigError("expected_inversion_power needs mean_gain, h* > 0");
    }
    if (v == 0.0) return 0.0;
    // Below the cutoff the power is flat; that piece integrates in closed
    // form against the exponential density. The inversion piece is handled
    // by composite Simpson on the normalized gain t = h / mean.
    const double c = cutoff / mean_gain;
    const double flat = v / cutoff * (1.0 - std::exp(-c));
    const double upper = c + 60.0;
    const int panels = 20000;
    const double dt = (upper - c) / panels;
    auto integrand = [&](double t) { return std::exp(-t) / t; };
    double simpson = integrand(c) + integrand(upper);
    for (int i = 1; i < panels; ++i) {
        simpson += (i % 2 ? 4.0 : 2.0) * integrand(c + i * dt);
    }
    simpson *= dt / 3.0;
    return flat + v / mean_gain * simpson;
}

double calibrate_inversion_v(double budget, double mean_gain, double cutoff,
                             double rel_tol) {
    if (budget < 0.0) throw ConfigError("budget must be nonnegative");
    if (budget == 0.0) return 0.0;
    double lo = 0.0;
    double hi = std::max(budget * cutoff, 1.0);
    int guard = 0;
    while (expected_inversion_power(hi, mean_gain, cutoff) < budget) {
        hi *= 2.0;
        if (++guard > 200) {
            throw CalibrationFailure("cannot bracket the inversion budget");
        }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (expected_inversion_power(mid, mean_gain, cutoff) < budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double v = 0.5 * (lo + hi);
    const double achieved = expected_inversion_power(v, mean_gain, cutoff);
    if (std::abs(achieved - budget) > rel_tol * budget) {
        std::ostringstream os;
        os << "inversion calibration missed the budget: target " << budget
           << ", achieved " << achieved;
        throw CalibrationFailure(os.str());
    }
    return v;
}

OptimalDecision optimal_policy_step(const PolicyState& prior, const Vector& eps,
                                    double budget, const ChannelParams& params,
                                    double gain) {
    const PowerSplit sol =
        solve_power_split(budget, prior.n_tau, params, gain);
    OptimalDecision d;
    d.state = PolicyState::scaled_pair(prior.tau, prior.sigma, sol.lambda,
                                       sol.base_power);
    d.power = data_driven_power(eps, d.state, sol.base_power, params, gain);
    return d;
}

OptimalDecision time_varying_step(const PolicyState& prev, const Vector& eps,
                                  double budget_k, const SystemModel& model,
                                  const ChannelParams& params, int gamma_prev,
                                  double gain) {
    Matrix sigma = gamma_prev ? model.sigma1 : sigma_recursion(prev.psi, model);
    const int tau = holding_time_update(prev.tau, gamma_prev);
    PolicyState prior;
    prior.tau = tau;
    prior.sigma_fact = psd::spectral(sigma);
    prior.sigma = std::move(sigma);
    prior.n_tau = prior.sigma_fact.rank;
    return optimal_policy_step(prior, eps, budget_k, params, gain);
}

PowerController::PowerController(PolicyConfig cfg, const SystemModel& model,
                                 const ChannelParams& channel)
    : cfg_(std::move(cfg)), model_(&model), channel_(channel),
      tag_(cfg_.tag()) {
    time_varying_mode_ =
        cfg_.kind == PolicyKind::TimeVaryingOptimal ||
        (cfg_.kind == PolicyKind::OptimalDataDriven && channel_.fading);
    if (cfg_.kind == PolicyKind::TruncatedInversion && !channel_.fading) {
        throw ConfigError("truncated inversion needs a fading channel");
    }
    tv_state_.tau = 0;  // first decide sees gamma_prev = 1 and resets
}

bool PowerController::data_driven() const {
    return cfg_.kind != PolicyKind::ConstantBaseline &&
           cfg_.kind != PolicyKind::TruncatedInversion;
}

const PolicyState& PowerController::state() const {
    if (time_varying_mode_) return tv_state_;
    if (tau_ < 1 || static_cast<size_t>(tau_) > table_.size()) {
        throw Error("policy state queried before decide_power");
    }
    return table_[tau_ - 1];
}

double PowerController::resolve_budget(double gain, int k) const {
    if (cfg_.budget_from_inversion) {
        return truncated_inversion_power(gain, cfg_.inversion_v,
                                         cfg_.inversion_cutoff);
    }
    if (!cfg_.budget_sequence.empty()) {
        return cfg_.budget_sequence[(k - 1) % cfg_.budget_sequence.size()];
    }
    return cfg_.budget;
}

const PolicyState& PowerController::stationary_state(int tau) {
    while (static_cast<int>(table_.size()) < tau) {
        const int t = static_cast<int>(table_.size()) + 1;
        Matrix sigma = t == 1 ? model_->sigma1
                              : sigma_recursion(table_.back().psi, *model_);
        switch (cfg_.kind) {
            case PolicyKind::OptimalDataDriven: {
                const int rank = psd::spectral(sigma).rank;
                const PowerSplit sol =
                    solve_power_split(cfg_.budget, rank, channel_);
                table_.push_back(PolicyState::scaled_pair(
                    t, std::move(sigma), sol.lambda, sol.base_power));
                break;
            }
            case PolicyKind::DataDriven: {
                if (static_cast<size_t>(t) <= cfg_.psi_schedule.size()) {
                    table_.push_back(PolicyState::general_pair(
                        t, std::move(sigma), cfg_.psi_schedule[t - 1],
                        cfg_.base_power));
                } else {
                    // Schedule exhausted: no shaping past the last entry.
                    PolicyState st = PolicyState::identity_pair(t, std::move(sigma));
                    st.base_power = cfg_.base_power;
                    table_.push_back(std::move(st));
                }
                break;
            }
            default:
                table_.push_back(PolicyState::identity_pair(t, std::move(sigma)));
                table_.back().base_power = cfg_.budget;
                break;
        }
    }
    return table_[tau - 1];
}

double PowerController::decide_power(const Vector& eps, double gain, int k) {
    switch (cfg_.kind) {
        case PolicyKind::ConstantBaseline:
            stationary_state(tau_);
            return cfg_.budget;
        case PolicyKind::TruncatedInversion:
            stationary_state(tau_);
            return truncated_inversion_power(gain, cfg_.inversion_v,
                                             cfg_.inversion_cutoff);
        case PolicyKind::DataDriven: {
            const PolicyState& st = stationary_state(tau_);
            return data_driven_power(eps, st, cfg_.base_power, channel_, gain);
        }
        case PolicyKind::OptimalDataDriven:
            if (!time_varying_mode_) {
                const PolicyState& st = stationary_state(tau_);
                return data_driven_power(eps, st, st.base_power, channel_, gain);
            }
            [[fallthrough]];
        case PolicyKind::TimeVaryingOptimal: {
            OptimalDecision d =
                time_varying_step(tv_state_, eps, resolve_budget(gain, k),
                                  *model_, channel_, last_gamma_, gain);
            tv_state_ = std::move(d.state);
            return d.power;
        }
    }
    throw Error("unreachable policy kind");
}

void PowerController::advance(int gamma) {
    tau_ = holding_time_update(tau_, gamma);
    last_gamma_ = gamma;
}

}  // namespace remest
