#include "remest/sim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace remest::sim {

double RunningScalar::se() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

Vector RunningCovariance::mean_se() const {
    if (n_ < 2) return Vector::Zero(mean_.size());
    return (m2_.diagonal() / static_cast<double>(n_ - 1) /
            static_cast<double>(n_))
        .cwiseSqrt();
}

RunningCross::RunningCross(int rows, int cols)
    : mean_(Matrix::Zero(rows, cols)), m2_(Matrix::Zero(rows, cols)) {}

void RunningCross::add(const Vector& a, const Vector& b) {
    ++n_;
    const Matrix x = a * b.transpose();
    const Matrix delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta.cwiseProduct(x - mean_);
}

Matrix RunningCross::mean() const { return mean_; }

Matrix RunningCross::se() const {
    if (n_ < 2) return Matrix::Zero(mean_.rows(), mean_.cols());
    return (m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_))
        .cwiseSqrt();
}

double binomial_se(double p, std::int64_t n) {
    return n > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) /
                             static_cast<double>(n))
                 : 0.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double>& samples, double sigma) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i] / sigma);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(f - lo), std::abs(f - hi)});
    }
    return d;
}

double ks_critical_value(double alpha, std::int64_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) /
           std::sqrt(static_cast<double>(n));
}

double max_entry_gap_rel(const Matrix& emp, const Matrix& expected) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(expected, Eigen::EigenvaluesOnly);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    return (emp - expected).cwiseAbs().maxCoeff() / scale;
}

}  // namespace remest::sim
