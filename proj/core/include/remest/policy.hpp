#ifndef REMEST_POLICY_HPP
#define REMEST_POLICY_HPP

#include <string>
#include <vector>

#include "remest/channel.hpp"
#include "remest/plant.hpp"
#include "remest/psdlin.hpp"

namespace remest {

enum class PolicyKind {
    ConstantBaseline,    // omega_k = budget, regardless of the data
    DataDriven,          // quadratic law with an explicit Psi_tau schedule
    OptimalDataDriven,   // budget-optimal parameterization, stationary budget
    TimeVaryingOptimal,  // budget-optimal with per-slot budgets
    TruncatedInversion,  // omega_k = v / max(h, h*), fading baseline
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::OptimalDataDriven;
    double budget = 0.0;      // power budget (expected power per slot)
    double base_power = 0.0;  // additive constant term for DataDriven
    std::vector<Matrix> psi_schedule;      // DataDriven: Psi_tau for tau = 1..L
    std::vector<double> budget_sequence;   // TimeVaryingOptimal, cycled over k
    bool budget_from_inversion = false;    // TimeVaryingOptimal: budget_k tracks the inversion law
    double inversion_v = 0.0;
    double inversion_cutoff = 0.0;         // h*

    std::string tag() const;

    static PolicyConfig constant_baseline(double budget);
    static PolicyConfig optimal(double budget);
    static PolicyConfig data_driven(std::vector<Matrix> psi_schedule,
                                    double base_power);
    static PolicyConfig time_varying(std::vector<double> budgets);
    static PolicyConfig time_varying_inversion(double v, double cutoff);
    static PolicyConfig truncated_inversion(double v, double cutoff);
};

/// Closed-form solution of the per-slot parameter problem: the common Phi
/// eigenvalue lambda and the constant power term. Above the budget threshold
/// N0W/(alpha gain) the eigenvalue saturates at 1 + 2/n_tau and the surplus
/// goes into the constant term; below it the constant term is zero.
struct PowerSplit {
    double lambda = 1.0;
    double base_power = 0.0;
};
PowerSplit solve_power_split(double budget, int n_tau,
                                  const ChannelParams& params,
                                  double gain = 1.0);

/// Controller parameter pair at one holding time: Sigma_tau (prior
/// covariance of the incremental innovation) and Psi_tau (its posterior
/// covariance given a drop), with cached factorizations, the shared rank
/// n_tau, and the nonzero eigenvalues of Phi_tau.
struct PolicyState {
    int tau = 1;
    Matrix sigma;
    Matrix psi;
    psd::SpectralFactorization sigma_fact;
    psd::SpectralFactorization psi_fact;
    Vector phi_eigs;      // descending, size n_tau; all >= 1 under dominance
    int n_tau = 0;
    double lambda = 0.0;  // common eigenvalue when psi = sigma/lambda, else 0
    double base_power = 0.0;

    /// 1 / (smallest nonzero eigenvalue of Phi_tau); diagnostic threshold.
    double epsilon_tau() const {
        return n_tau > 0 ? 1.0 / phi_eigs[n_tau - 1] : 1.0;
    }

    /// Psi = Sigma (no shaping; the baseline special case).
    static PolicyState identity_pair(int tau, Matrix sigma);

    /// Psi = Sigma / lambda with lambda >= 1; shares Sigma's factorization.
    static PolicyState scaled_pair(int tau, Matrix sigma, double lambda,
                                   double base_power);

    /// Explicit (Sigma, Psi); validates the dominance pair condition and
    /// throws DominanceViolation when it fails.
    static PolicyState general_pair(int tau, Matrix sigma, Matrix psi,
                                    double base_power);
};

/// Sigma_tau = A Psi_{tau-1} A' + (h(pbar) - pbar), with Psi_0 = 0.
Matrix sigma_recursion(const Matrix& psi_prev, const SystemModel& model);

/// Quadratic power law: (N0W / (2 alpha gain)) eps' (Psi^- - Sigma^-) eps
/// + base_power. The innovation must lie in the support of Sigma; a
/// relative orthogonal component above 1e-6 raises SupportViolation.
double data_driven_power(const Vector& eps, const PolicyState& state, double base_power,
                const ChannelParams& params, double gain = 1.0);

/// E[omega_k | I_{k-1}] = (N0W / (2 alpha gain)) (Tr(Phi) - n_tau) + base.
double expected_power(const Matrix& sigma, const Matrix& psi, double base_power,
                      const ChannelParams& params, double gain = 1.0);
double expected_power(const PolicyState& state, const ChannelParams& params,
                      double gain = 1.0);

/// Pr(gamma = 0 | I_{k-1}) = det(Phi)^{-1/2} exp(-alpha gain base / N0W),
/// pseudo-determinants throughout.
double drop_rate_formula(const Matrix& sigma, const Matrix& psi,
                         double base_power, const ChannelParams& params,
                         double gain = 1.0);
double drop_rate_formula(const PolicyState& state, const ChannelParams& params,
                         double gain = 1.0);

/// Offline rank table: n_tau = rank(h^tau(pbar) - pbar). Constant for
/// tau >= n.
int n_tau_offline(const SystemModel& model, int tau);

/// Inversion law: v / h above the cutoff, capped at v / h* below it.
double truncated_inversion_power(double gain, double v, double cutoff);

/// Mean of the truncated-inversion power under an exponential gain law,
/// by quadrature; the calibration oracle for the inversion baseline.
double expected_inversion_power(double v, double mean_gain, double cutoff);

/// Choose v by bisection so the expected inversion power meets the budget
/// within rel_tol. Throws CalibrationFailure when it cannot.
double calibrate_inversion_v(double budget, double mean_gain, double cutoff,
                             double rel_tol = 0.01);

/// One slot of the budget-optimal controller: power for the given
/// innovation plus the completed parameter pair (Psi = Sigma / lambda*).
struct OptimalDecision {
    double power = 0.0;
    PolicyState state;
};
OptimalDecision optimal_policy_step(const PolicyState& prior, const Vector& eps,
                                    double budget, const ChannelParams& params,
                                    double gain = 1.0);

/// Time-varying variant: first advances the parameter recursion
/// Sigma_k = (1 - gamma_prev) A Psi_{k-1} A' + Sigma_1 (a receipt resets it),
/// then applies the two-branch optimal law with the slot budget. Under
/// fading the slot gain folds into the branch threshold, since both sides
/// know the gain at slot start.
OptimalDecision time_varying_step(const PolicyState& prev, const Vector& eps,
                                  double budget_k, const SystemModel& model,
                                  const ChannelParams& params, int gamma_prev,
                                  double gain = 1.0);

/// Per-trial driver for one configured policy: owns the holding-time
/// bookkeeping and the Sigma/Psi recursion state, prices each slot's
/// innovation, and consumes the acknowledgment stream. The remote estimator
/// reads psi()/state() from the same instance, which realizes the
/// deterministic parameter mirror between sensor and estimator.
///
/// Contract per slot: decide_power() exactly once, then advance() with the
/// realized ack.
class PowerController {
public:
    PowerController(PolicyConfig cfg, const SystemModel& model,
                    const ChannelParams& channel);

    double decide_power(const Vector& eps, double gain, int k);
    void advance(int gamma);

    int current_tau() const { return tau_; }
    /// True when the estimator should use the data-driven covariance law
    /// (P = pbar + Psi_tau on drop) rather than the baseline one.
    bool data_driven() const;
    const PolicyState& state() const;
    const Matrix& psi() const { return state().psi; }
    int current_n_tau() const { return state().n_tau; }
    const std::string& tag() const { return tag_; }
    const PolicyConfig& config() const { return cfg_; }

private:
    const PolicyState& stationary_state(int tau);
    double resolve_budget(double gain, int k) const;

    PolicyConfig cfg_;
    const SystemModel* model_;
    ChannelParams channel_;
    std::string tag_;
    int tau_ = 1;
    int last_gamma_ = 1;
    bool time_varying_mode_ = false;
    std::vector<PolicyState> table_;  // stationary states, entry i = tau i+1
    PolicyState tv_state_;
};

}  // namespace remest

#endif  // REMEST_POLICY_HPP
