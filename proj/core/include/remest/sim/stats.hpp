#ifndef REMEST_SIM_STATS_HPP
#define REMEST_SIM_STATS_HPP

#include <cstdint>
#include <vector>

#include "remest/psdlin.hpp"

namespace remest::sim {

/// Welford running mean/variance for a scalar stream.
class RunningScalar {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    /// Standard error of the mean.
    double se() const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Running mean vector and covariance matrix of a vector stream.
class RunningCovariance {
public:
    explicit RunningCovariance(int dim)
        : mean_(Vector::Zero(dim)),
          m2_(Matrix::Zero(dim, dim)),
          sum_outer_(Matrix::Zero(dim, dim)) {}

    void add(const Vector& x) {
        ++n_;
        const Vector delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_).transpose();
        sum_outer_ += x * x.transpose();
    }

    std::int64_t count() const { return n_; }
    const Vector& mean() const { return mean_; }
    Matrix covariance() const {
        return n_ > 1 ? Matrix(m2_ / static_cast<double>(n_ - 1))
                      : Matrix::Zero(mean_.size(), mean_.size());
    }
    /// Second moment about zero (for zero-mean conditional laws).
    Matrix second_moment() const {
        return n_ > 0 ? Matrix(sum_outer_ / static_cast<double>(n_))
                      : Matrix::Zero(mean_.size(), mean_.size());
    }

    /// Standard error of each mean component.
    Vector mean_se() const;

private:
    std::int64_t n_ = 0;
    Vector mean_;
    Matrix m2_;
    Matrix sum_outer_;
};

/// Entrywise mean of outer products a b' with per-entry standard errors;
/// the oracle for cross-covariance checks against zero.
class RunningCross {
public:
    RunningCross(int rows, int cols);

    void add(const Vector& a, const Vector& b);

    Matrix mean() const;
    Matrix se() const;
    std::int64_t count() const { return n_; }

private:
    std::int64_t n_ = 0;
    Matrix mean_;
    Matrix m2_;
};

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_se(double p, std::int64_t n);

/// Standard normal CDF.
double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov statistic against N(0, sigma^2).
/// Sorts the sample buffer in place.
double ks_statistic_normal(std::vector<double>& samples, double sigma);

/// Asymptotic KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(n).
double ks_critical_value(double alpha, std::int64_t n);

/// Largest |emp(i,j) - expected(i,j)| measured in units of the expected
/// matrix's largest eigenvalue; the scale convention for entrywise
/// covariance matches.
double max_entry_gap_rel(const Matrix& emp, const Matrix& expected);

}  // namespace remest::sim

#endif  // REMEST_SIM_STATS_HPP
