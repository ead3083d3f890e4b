#include <doctest.h>

#include <cmath>

#include "remest/plant.hpp"

using namespace remest;

namespace {

SystemModel paper_model() {
    Matrix a(2, 2), c(2, 2);
    a << 0.99, 0.3, 0.1, 0.7;
    c << 2.3, 1.0, 1.0, 1.8;
    return SystemModel::make(a, c, Matrix::Identity(2, 2),
                             Matrix::Identity(2, 2));
}

// Strictly stable plant for the single-trajectory Monte Carlo checks (the
// paper system drifts past the unit circle, so its raw state cannot ride
// one 1e5-step trajectory in doubles).
SystemModel stable_model() {
    Matrix a(2, 2), c(2, 2);
    a << 0.6, 0.2, -0.1, 0.5;
    c << 2.3, 1.0, 1.0, 1.8;
    return SystemModel::make(a, c, Matrix::Identity(2, 2),
                             Matrix::Identity(2, 2));
}

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("scalar riccati fixed point solved by hand") {
    // A = 0, Q = C = R = 1: prior is always Q = 1, so
    // pbar = 1 - 1/(1+1) = 0.5.
    Matrix one(1, 1), zero(1, 1);
    one << 1.0;
    zero << 0.0;
    const SystemModel m = SystemModel::make(zero, one, one, one);
    CHECK(m.pbar(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("riccati fixed point is independent of the initialization") {
    const SystemModel m = paper_model();
    const Matrix from_zero = steady_state_covariance(
        m, 1e-13, 200000, Matrix(Matrix::Zero(2, 2)));
    const Matrix from_far = steady_state_covariance(
        m, 1e-13, 200000, Matrix(10.0 * Matrix::Identity(2, 2)));
    CHECK((from_zero - from_far).norm() < 1e-9);

    // Pinned regression fixture, produced by this iteration at 1e-13.
    const Matrix pinned = mat2(0.263232477302394, -0.21320616069655,
                               -0.21320616069655, 0.368430513880615);
    CHECK((m.pbar - pinned).norm() < 1e-9);
}

TEST_CASE("near-perfect observation drives pbar to zero") {
    Matrix a(2, 2);
    a << 0.5, 0.1, 0.0, 0.4;
    const SystemModel m =
        SystemModel::make(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                          Matrix(1e-8 * Matrix::Identity(2, 2)));
    CHECK(m.pbar.norm() < 1e-6);
}

TEST_CASE("riccati signals non-convergence on an absurd iteration budget") {
    const SystemModel m = paper_model();
    CHECK_THROWS_AS(steady_state_covariance(m, 1e-13, 3, Matrix(Matrix::Zero(2, 2))),
                    NoConvergence);
}

TEST_CASE("model validation: R must be positive definite") {
    Matrix a(1, 1), c(1, 1), q(1, 1), r(1, 1);
    a << 0.5;
    c << 1.0;
    q << 1.0;
    r << 0.0;
    CHECK_THROWS_AS(SystemModel::make(a, c, q, r), ConfigError);
}

TEST_CASE("lyapunov_step: zero state, nilpotent A, and PSD innovation") {
    const SystemModel m = paper_model();
    CHECK((lyapunov_step(Matrix::Zero(2, 2), m) - m.q).norm() == 0.0);

    Matrix a0 = Matrix::Zero(2, 2);
    const SystemModel mz = SystemModel::make(a0, Matrix::Identity(2, 2),
                                             Matrix::Identity(2, 2),
                                             Matrix::Identity(2, 2));
    CHECK((lyapunov_step(mat2(3, 1, 1, 2), mz) - mz.q).norm() == 0.0);

    // h(pbar) - pbar is the innovation covariance of the local estimate and
    // must be PSD.
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma1, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK_THROWS_AS(lyapunov_step(Matrix::Zero(3, 3), m), DimensionMismatch);
}

TEST_CASE("simulate_step: noiseless case is deterministic") {
    Matrix a(2, 2);
    a << 0.5, 0.2, 0.0, 0.3;
    const SystemModel m = SystemModel::make_unchecked(
        a, Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2));
    Mt64Source rng(1);
    Vector x(2);
    x << 1.0, -1.0;
    const auto [x_next, y_next] = simulate_step(x, m, rng);
    CHECK((x_next - a * x).norm() == 0.0);
    CHECK((y_next - x_next).norm() == 0.0);
}

TEST_CASE("simulate_step: zero-mean propagation within the CLT band") {
    const int n_steps = 100000;
    Matrix a(2, 2);
    a << 0.6, 0.2, -0.1, 0.5;
    const SystemModel m =
        SystemModel::make(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                          Matrix::Identity(2, 2));
    Mt64Source rng(17);
    Vector sum = Vector::Zero(2);
    const Vector x0 = Vector::Zero(2);
    for (int i = 0; i < n_steps; ++i) {
        sum += simulate_step(x0, m, rng).first;
    }
    // One-step state is N(0, Q): each mean within 3 sigma / sqrt(N).
    const double band = 3.0 / std::sqrt(static_cast<double>(n_steps));
    CHECK(std::abs(sum[0] / n_steps) < band);
    CHECK(std::abs(sum[1] / n_steps) < band);
}

TEST_CASE("simulate_step: long-run state covariance hits the lyapunov fixed "
          "point") {
    const int n_steps = 100000;
    Matrix a(2, 2);
    a << 0.6, 0.2, -0.1, 0.5;
    const SystemModel m =
        SystemModel::make(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                          Matrix::Identity(2, 2));
    const Matrix target = stationary_state_covariance(m.a, m.q);

    Mt64Source rng(23);
    Vector x = Vector::Zero(2);
    Matrix acc = Matrix::Zero(2, 2);
    for (int i = 0; i < n_steps; ++i) {
        x = simulate_step(x, m, rng).first;
        acc += x * x.transpose();
    }
    acc /= n_steps;
    CHECK((acc - target).cwiseAbs().maxCoeff() < 0.05 * target.norm());
}

TEST_CASE("kalman_update: zero innovation propagates the prediction exactly") {
    const SystemModel m = paper_model();
    LocalFilter f = LocalFilter::at_steady_state(m);
    f.xhat << 0.7, -0.3;
    const Vector y = m.c * (m.a * f.xhat);
    const LocalFilter next = kalman_update(f, y, m);
    CHECK((next.xhat - m.a * f.xhat).norm() == 0.0);
    CHECK((next.p - m.pbar).norm() == 0.0);
}

TEST_CASE("kalman_update: transient run from the prior reaches and holds "
          "steady state") {
    const SystemModel m = stable_model();
    LocalFilter f = LocalFilter::from_prior(m);
    Mt64Source rng(3);
    Vector x = Vector::Zero(2);
    for (int i = 0; i < 2000; ++i) {
        auto [xn, y] = simulate_step(x, m, rng);
        x = xn;
        f = kalman_update(f, y, m);
    }
    CHECK(f.steady);
    for (int i = 0; i < 100; ++i) {
        auto [xn, y] = simulate_step(x, m, rng);
        x = xn;
        f = kalman_update(f, y, m);
        CHECK((f.p - m.pbar).norm() < 1e-9);
    }
}

TEST_CASE("kalman_update: empirical error covariance matches pbar within 5%") {
    const SystemModel m = stable_model();
    const int n_steps = 100000;
    Mt64Source rng(31);
    Vector x = Vector::Zero(2);
    LocalFilter f = LocalFilter::at_steady_state(m);
    Matrix acc = Matrix::Zero(2, 2);
    Vector mean_err = Vector::Zero(2);
    for (int i = 0; i < n_steps; ++i) {
        auto [xn, y] = simulate_step(x, m, rng);
        x = xn;
        f = kalman_update(f, y, m);
        const Vector e = x - f.xhat;
        acc += e * e.transpose();
        mean_err += e;
    }
    acc /= n_steps;
    mean_err /= n_steps;
    CHECK((acc - m.pbar).cwiseAbs().maxCoeff() < 0.05 * m.pbar.norm());
    // Unbiasedness, loose 4-standard-error band with var ~ pbar diagonal.
    for (int i = 0; i < 2; ++i) {
        const double se = std::sqrt(m.pbar(i, i) / n_steps);
        CHECK(std::abs(mean_err[i]) < 4.0 * se);
    }
}

TEST_CASE("incremental_innovation: null information and memoryless cases") {
    const SystemModel m = paper_model();
    Vector last(2);
    last << 1.0, 2.0;
    const Vector pred = matrix_power(m.a, 3) * last;
    CHECK(incremental_innovation(pred, last, 3, m).norm() == 0.0);

    Matrix a0 = Matrix::Zero(2, 2);
    const SystemModel mz = SystemModel::make(a0, Matrix::Identity(2, 2),
                                             Matrix::Identity(2, 2),
                                             Matrix::Identity(2, 2));
    Vector now(2);
    now << 0.4, -0.1;
    CHECK((incremental_innovation(now, last, 1, mz) - now).norm() == 0.0);
}

TEST_CASE("incremental_innovation: tau = 1 covariance matches sigma1 within "
          "5% when every packet is delivered") {
    const SystemModel m = stable_model();
    const int n_steps = 100000;
    Mt64Source rng(41);
    Vector x = Vector::Zero(2);
    LocalFilter f = LocalFilter::at_steady_state(m);
    Vector prev = f.xhat;
    Matrix acc = Matrix::Zero(2, 2);
    for (int i = 0; i < n_steps; ++i) {
        auto [xn, y] = simulate_step(x, m, rng);
        x = xn;
        f = kalman_update(f, y, m);
        const Vector eps = incremental_innovation(f.xhat, prev, 1, m);
        acc += eps * eps.transpose();
        prev = f.xhat;
    }
    acc /= n_steps;
    CHECK((acc - m.sigma1).cwiseAbs().maxCoeff() < 0.05 * m.sigma1.norm());
}

TEST_CASE("matrix powers: repeated squaring agrees with naive products and "
          "the memo") {
    const SystemModel m = paper_model();
    Matrix naive = Matrix::Identity(2, 2);
    MatrixPowers powers(m.a);
    for (int tau = 1; tau <= 12; ++tau) {
        naive = naive * m.a;
        CHECK((matrix_power(m.a, tau) - naive).norm() < 1e-12 * naive.norm());
        CHECK((powers.of(tau) - naive).norm() < 1e-12 * naive.norm());
    }
    CHECK((matrix_power(m.a, 0) - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("unconditional cross-covariance of local error and innovation "
          "vanishes") {
    const SystemModel m = stable_model();
    const int n_steps = 100000;
    Mt64Source rng(53);
    Vector x = Vector::Zero(2);
    LocalFilter f = LocalFilter::at_steady_state(m);
    Vector prev = f.xhat;
    Matrix acc = Matrix::Zero(2, 2);
    for (int i = 0; i < n_steps; ++i) {
        auto [xn, y] = simulate_step(x, m, rng);
        x = xn;
        f = kalman_update(f, y, m);
        const Vector eps = incremental_innovation(f.xhat, prev, 1, m);
        acc += (x - f.xhat) * eps.transpose();
        prev = f.xhat;
    }
    acc /= n_steps;
    // Var of each product entry is about pbar_ii * sigma1_jj.
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double se =
                std::sqrt(m.pbar(i, i) * m.sigma1(j, j) / n_steps);
            CHECK(std::abs(acc(i, j)) < 4.0 * se);
        }
    }
}
