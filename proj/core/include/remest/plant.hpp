#ifndef REMEST_PLANT_HPP
#define REMEST_PLANT_HPP

#include <optional>
#include <unordered_map>
#include <utility>

#include "remest/psdlin.hpp"
#include "remest/random.hpp"

namespace remest {

/// LTI plant x_{k+1} = A x_k + w_k, y_k = C x_k + v_k with w ~ N(0,Q),
/// v ~ N(0,R), x_0 ~ N(0, Pi0). Immutable after construction; derived
/// steady-state quantities are computed once up front.
struct SystemModel {
    Matrix a;    // n x n state transition
    Matrix c;    // m x n observation
    Matrix q;    // n x n process noise covariance, PSD
    Matrix r;    // m x m observation noise covariance, PD
    Matrix pi0;  // n x n initial state covariance
    int n = 0;
    int m = 0;

    // Derived at construction.
    double spectral_radius = 0.0;
    Matrix pbar;            // steady-state posterior covariance of the local KF
    Matrix steady_gain;     // steady Kalman gain
    Matrix h_pbar;          // h(pbar) = A pbar A' + Q (prior covariance)
    Matrix sigma1;          // h(pbar) - pbar, the one-step innovation covariance
    Matrix stationary_cov;  // fixed point of X = A X A' + Q
    Matrix q_sqrt;          // factor with q_sqrt q_sqrt' = Q
    Matrix r_sqrt;
    Matrix pbar_sqrt;
    Matrix estimate_cov_sqrt;  // factor of (stationary_cov - pbar)

    /// Validates invariants (detectability, stabilizability, R > 0) and
    /// computes the derived quantities. Pi0 defaults to the stationary
    /// state covariance when A is strictly stable, to pbar otherwise (the
    /// filter-side quantities exist either way; spectral_radius records
    /// which regime the model is in).
    static SystemModel make(Matrix a, Matrix c, Matrix q, Matrix r,
                            std::optional<Matrix> pi0 = std::nullopt);

    /// Skips the invariant checks; for degenerate test fixtures only.
    static SystemModel make_unchecked(Matrix a, Matrix c, Matrix q, Matrix r,
                                      std::optional<Matrix> pi0 = std::nullopt);
};

/// One-step open-loop covariance prediction h(X) = A X A' + Q.
Matrix lyapunov_step(const Matrix& x, const SystemModel& model);

/// h applied `times` times.
Matrix iterate_lyapunov(Matrix x, const SystemModel& model, int times);

/// Fixed point of the posterior Riccati recursion (predict with A,Q;
/// correct with C,R), iterated from `initial` (default Pi0) until the
/// Frobenius change drops below tol. Throws NoConvergence past max_iter.
Matrix steady_state_covariance(const SystemModel& model, double tol = 1e-12,
                               int max_iter = 100000,
                               std::optional<Matrix> initial = std::nullopt);

/// Fixed point of X = A X A' + Q (stationary state covariance).
Matrix stationary_state_covariance(const Matrix& a, const Matrix& q,
                                   double tol = 1e-13, int max_iter = 200000);

/// Sensor-side Kalman filter state. Updated functionally; once the Riccati
/// recursion reaches its fixed point the gain and covariance freeze.
struct LocalFilter {
    Vector xhat;
    Matrix p;
    bool steady = false;

    /// x0 = 0, P0 = Pi0 (transient start).
    static LocalFilter from_prior(const SystemModel& model);

    /// Already-converged filter with the given estimate.
    static LocalFilter at_steady_state(const SystemModel& model,
                                       std::optional<Vector> xhat0 = std::nullopt);
};

/// Standard predict-correct step; detects the steady state (Frobenius change
/// < 1e-12) and from then on applies the frozen gain.
LocalFilter kalman_update(const LocalFilter& f, const Vector& y,
                          const SystemModel& model);

/// Draw (x_next, y_next): x_next = A x + w, y_next = C x_next + v.
std::pair<Vector, Vector> simulate_step(const Vector& x,
                                        const SystemModel& model,
                                        RandomSource& rng);

/// A^p by binary exponentiation.
Matrix matrix_power(const Matrix& a, int p);

/// Memoized powers of A. Holding times revisit the same exponents along a
/// drop burst; misses cost O(log tau) multiplies. Per-trial, not shared.
class MatrixPowers {
public:
    explicit MatrixPowers(Matrix a) : a_(std::move(a)) {}

    const Matrix& of(int tau);

private:
    Matrix a_;
    std::unordered_map<int, Matrix> memo_;
};

/// Incremental innovation: the gap between the sensor's current local
/// estimate and the open-loop prediction from the last delivered one.
Vector incremental_innovation(const Vector& xhat_now,
                              const Vector& xhat_last_rx, int tau,
                              const SystemModel& model);
Vector incremental_innovation(const Vector& xhat_now,
                              const Vector& xhat_last_rx, int tau,
                              MatrixPowers& powers);

}  // namespace remest

#endif  // REMEST_PLANT_HPP
