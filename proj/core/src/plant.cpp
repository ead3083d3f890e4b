#include "remest/plant.hpp"

#include <cmath>
#include <sstream>

namespace remest {

namespace {

double compute_spectral_radius(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// One posterior Riccati update: predict with (A, Q), correct with (C, R).
/// The innovation covariance is inverted through the pseudo-inverse so that
/// degenerate fixtures (R singular) stay finite.
Matrix riccati_update(const Matrix& p, const Matrix& a, const Matrix& c,
                      const Matrix& q, const Matrix& r) {
    const Matrix prior = symmetrize(a * p * a.transpose() + q);
    const Matrix s = symmetrize(c * prior * c.transpose() + r);
    const Matrix gain = prior * c.transpose() * psd::pseudo_inverse(s);
    return symmetrize(prior - gain * c * prior);
}

Matrix steady_state_covariance_raw(const Matrix& a, const Matrix& c,
                                   const Matrix& q, const Matrix& r,
                                   const Matrix& initial, double tol,
                                   int max_iter) {
    Matrix p = symmetrize(initial);
    for (int it = 0; it < max_iter; ++it) {
        const Matrix next = riccati_update(p, a, c, q, r);
        const double delta = (next - p).norm();
        p = next;
        if (delta < tol) return p;
    }
    throw NoConvergence("Riccati iteration did not reach its fixed point");
}

/// PBH rank tests on the eigenvalues at or outside the unit circle. With a
/// strictly stable A these never trigger; they guard near-boundary models.
void check_detectable_stabilizable(const Matrix& a, const Matrix& c,
                                   const Matrix& q_sqrt) {
    const int n = static_cast<int>(a.rows());
    Eigen::EigenSolver<Matrix> es(a);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> lam = es.eigenvalues()[i];
        if (std::abs(lam) < 1.0 - 1e-9) continue;
        Eigen::MatrixXcd pbh_obs(n + c.rows(), n);
        pbh_obs.topRows(n) =
            lam * Eigen::MatrixXcd::Identity(n, n) - a.cast<std::complex<double>>();
        pbh_obs.bottomRows(c.rows()) = c.cast<std::complex<double>>();
        if (Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>(pbh_obs).rank() < n) {
            throw ConfigError("(A, C) is not detectable");
        }
        Eigen::MatrixXcd pbh_ctl(n, n + q_sqrt.cols());
        pbh_ctl.leftCols(n) =
            lam * Eigen::MatrixXcd::Identity(n, n) - a.cast<std::complex<double>>();
        pbh_ctl.rightCols(q_sqrt.cols()) = q_sqrt.cast<std::complex<double>>();
        if (Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>(pbh_ctl).rank() < n) {
            throw ConfigError("(A, Q^{1/2}) is not stabilizable");
        }
    }
}

SystemModel build(Matrix a, Matrix c, Matrix q, Matrix r,
                  std::optional<Matrix> pi0, bool validate) {
    SystemModel model;
    model.n = static_cast<int>(a.rows());
    model.m = static_cast<int>(c.rows());
    if (a.cols() != model.n || c.cols() != model.n ||
        q.rows() != model.n || q.cols() != model.n ||
        r.rows() != model.m || r.cols() != model.m) {
        throw DimensionMismatch("SystemModel: inconsistent matrix dimensions");
    }
    model.a = std::move(a);
    model.c = std::move(c);
    model.q = std::move(q);
    model.r = std::move(r);

    model.spectral_radius = compute_spectral_radius(model.a);
    const psd::SpectralFactorization qf = psd::spectral(model.q);
    const psd::SpectralFactorization rf = psd::spectral(model.r);
    model.q_sqrt = psd::sqrt_factor(qf);
    model.r_sqrt = psd::sqrt_factor(rf);

    if (validate) {
        if (rf.rank < model.m) {
            throw ConfigError("SystemModel: R must be strictly positive definite");
        }
        check_detectable_stabilizable(model.a, model.c, model.q_sqrt);
    }

    if (pi0 && (pi0->rows() != model.n || pi0->cols() != model.n)) {
        throw DimensionMismatch("SystemModel: Pi0 dimension mismatch");
    }
    model.pbar = steady_state_covariance_raw(
        model.a, model.c, model.q, model.r,
        pi0 ? *pi0 : Matrix(Matrix::Identity(model.n, model.n)), 1e-12, 100000);
    model.h_pbar = symmetrize(model.a * model.pbar * model.a.transpose() + model.q);
    const Matrix s =
        symmetrize(model.c * model.h_pbar * model.c.transpose() + model.r);
    model.steady_gain =
        model.h_pbar * model.c.transpose() * psd::pseudo_inverse(s);
    model.sigma1 = symmetrize(model.h_pbar - model.pbar);
    model.pbar_sqrt = psd::sqrt_factor(model.pbar);

    // The plant has a stationary law only for a strictly stable A. Past the
    // unit circle the initial estimate pins to zero instead; every recorded
    // statistic depends on the state only through the (stationary)
    // estimation-error processes, so the choice does not move any metric.
    if (model.spectral_radius < 1.0 - 1e-9) {
        model.stationary_cov = stationary_state_covariance(model.a, model.q);
    } else {
        model.stationary_cov = model.pbar;
    }
    model.pi0 = pi0 ? std::move(*pi0) : model.stationary_cov;
    model.estimate_cov_sqrt =
        psd::sqrt_factor(symmetrize(model.stationary_cov - model.pbar));
    return model;
}

}  // namespace

SystemModel SystemModel::make(Matrix a, Matrix c, Matrix q, Matrix r,
                              std::optional<Matrix> pi0) {
    return build(std::move(a), std::move(c), std::move(q), std::move(r),
                 std::move(pi0), /*validate=*/true);
}

SystemModel SystemModel::make_unchecked(Matrix a, Matrix c, Matrix q, Matrix r,
                                        std::optional<Matrix> pi0) {
    return build(std::move(a), std::move(c), std::move(q), std::move(r),
                 std::move(pi0), /*validate=*/false);
}

Matrix lyapunov_step(const Matrix& x, const SystemModel& model) {
    if (x.rows() != model.n || x.cols() != model.n) {
        throw DimensionMismatch("lyapunov_step: dimension mismatch");
    }
    return symmetrize(model.a * x * model.a.transpose() + model.q);
}

Matrix iterate_lyapunov(Matrix x, const SystemModel& model, int times) {
    for (int i = 0; i < times; ++i) x = lyapunov_step(x, model);
    return x;
}

Matrix steady_state_covariance(const SystemModel& model, double tol,
                               int max_iter, std::optional<Matrix> initial) {
    return steady_state_covariance_raw(model.a, model.c, model.q, model.r,
                                       initial ? *initial : model.pi0, tol,
                                       max_iter);
}

Matrix stationary_state_covariance(const Matrix& a, const Matrix& q,
                                   double tol, int max_iter) {
    Matrix x = q;
    for (int it = 0; it < max_iter; ++it) {
        const Matrix next = symmetrize(a * x * a.transpose() + q);
        const double delta = (next - x).norm();
        x = next;
        if (delta < tol) return x;
    }
    throw NoConvergence("Lyapunov iteration did not converge (is A stable?)");
}

LocalFilter LocalFilter::from_prior(const SystemModel& model) {
    LocalFilter f;
    f.xhat = Vector::Zero(model.n);
    f.p = model.pi0;
    f.steady = false;
    return f;
}

LocalFilter LocalFilter::at_steady_state(const SystemModel& model,
                                         std::optional<Vector> xhat0) {
    LocalFilter f;
    f.xhat = xhat0 ? std::move(*xhat0) : Vector::Zero(model.n);
    f.p = model.pbar;
    f.steady = true;
    return f;
}

LocalFilter kalman_update(const LocalFilter& f, const Vector& y,
                          const SystemModel& model) {
    LocalFilter next;
    if (f.steady) {
        const Vector pred = model.a * f.xhat;
        next.xhat = pred + model.steady_gain * (y - model.c * pred);
        next.p = model.pbar;
        next.steady = true;
        return next;
    }
    const Matrix prior = symmetrize(model.a * f.p * model.a.transpose() + model.q);
    const Matrix s = symmetrize(model.c * prior * model.c.transpose() + model.r);
    const Matrix gain = prior * model.c.transpose() * psd::pseudo_inverse(s);
    const Vector pred = model.a * f.xhat;
    next.xhat = pred + gain * (y - model.c * pred);
    next.p = symmetrize(prior - gain * model.c * prior);
    next.steady = (next.p - f.p).norm() < 1e-12;
    if (next.steady) next.p = model.pbar;
    return next;
}

std::pair<Vector, Vector> simulate_step(const Vector& x,
                                        const SystemModel& model,
                                        RandomSource& rng) {
    Vector zw(model.n);
    for (int i = 0; i < model.n; ++i) zw[i] = rng.normal();
    Vector zv(model.m);
    for (int i = 0; i < model.m; ++i) zv[i] = rng.normal();
    Vector x_next = model.a * x + model.q_sqrt * zw;
    Vector y_next = model.c * x_next + model.r_sqrt * zv;
    return {std::move(x_next), std::move(y_next)};
}

Matrix matrix_power(const Matrix& a, int p) {
    Matrix result = Matrix::Identity(a.rows(), a.cols());
    Matrix base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        p >>= 1;
        if (p) base = base * base;
    }
    return result;
}

const Matrix& MatrixPowers::of(int tau) {
    auto it = memo_.find(tau);
    if (it == memo_.end()) {
        it = memo_.emplace(tau, matrix_power(a_, tau)).first;
    }
    return it->second;
}

Vector incremental_innovation(const Vector& xhat_now,
                              const Vector& xhat_last_rx, int tau,
                              const SystemModel& model) {
    return xhat_now - matrix_power(model.a, tau) * xhat_last_rx;
}

Vector incremental_innovation(const Vector& xhat_now,
                              const Vector& xhat_last_rx, int tau,
                              MatrixPowers& powers) {
    return xhat_now - powers.of(tau) * xhat_last_rx;
}

}  // namespace remest
