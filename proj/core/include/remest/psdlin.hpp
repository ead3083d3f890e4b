#ifndef REMEST_PSDLIN_HPP
#define REMEST_PSDLIN_HPP

#include <Eigen/Dense>

#include "remest/errors.hpp"
#include "remest/random.hpp"

namespace remest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Linear algebra for positive semi-definite, possibly singular matrices:
/// spectral factorization with rank detection, Moore-Penrose pseudo-inverse,
/// pseudo-determinant, square-root factor, dominance checks, and sampling of
/// degenerate Gaussians on their affine support.
namespace psd {

/// Relative eigenvalue cutoff: eigenvalues below rank_tol * max eigenvalue
/// are truncated to exactly zero. Relative thresholding keeps rank detection
/// stable across the scales the covariance recursions produce.
inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-10;

/// M = U diag(d) U' with orthogonal U and eigenvalues sorted descending.
/// Truncated eigenvalues are exactly zero; `rank` counts the survivors.
struct SpectralFactorization {
    Matrix u;
    Vector d;
    int rank = 0;

    int dim() const { return static_cast<int>(d.size()); }

    Matrix reconstruct() const { return u * d.asDiagonal() * u.transpose(); }

    /// i-th smallest nonzero eigenvalue (1-based), matching the lambda_i
    /// convention used throughout the policy layer. The storage order is
    /// descending, so this accessor avoids off-by-one index confusion.
    double lambda_from_smallest(int i) const {
        if (i < 1 || i > rank) throw DimensionMismatch("lambda index out of range");
        return d[rank - i];
    }

    /// Orthonormal basis of the support Im(M^{1/2}) (n x rank).
    Matrix support_basis() const { return u.leftCols(rank); }

    /// Orthogonal projector onto the support.
    Matrix support_projector() const {
        return u.leftCols(rank) * u.leftCols(rank).transpose();
    }

    /// x' M^- x evaluated through the factorization, O(n * rank).
    /// Components of x outside the support are ignored.
    double quadform_pinv(const Vector& x) const {
        double s = 0.0;
        for (int i = 0; i < rank; ++i) {
            const double z = u.col(i).dot(x);
            s += z * z / d[i];
        }
        return s;
    }

    /// Norm of the component of x orthogonal to the support.
    double support_distance(const Vector& x) const {
        Vector r = x;
        for (int i = 0; i < rank; ++i) r -= u.col(i).dot(x) * u.col(i);
        return r.norm();
    }
};

/// Spectral factorization of a symmetric PSD matrix.
/// Throws NotSymmetric / NotPsd when the input violates its contract.
SpectralFactorization spectral(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudo-inverse U [Delta^-1 0; 0 0] U'.
Matrix pseudo_inverse(const SpectralFactorization& f);
Matrix pseudo_inverse(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Product of the nonzero eigenvalues. Throws ZeroMatrix for rank 0.
double pseudo_det(const SpectralFactorization& f);
double pseudo_det(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Square-root factor S = U sqrt(D), so S S' = M. Columns past the rank
/// are exactly zero.
Matrix sqrt_factor(const SpectralFactorization& f);
Matrix sqrt_factor(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Result of the dominance check Sigma >= Psi, Psi^- >= Sigma^-.
/// When both eigenvalue conditions hold, rank equality and image equality of
/// the square-root factors follow and are verified as part of the check.
struct DominanceReport {
    bool sigma_ge_psi = false;       // min eig(Sigma - Psi) >= -tol
    bool pinv_psi_ge_sigma = false;  // min eig(Psi^- - Sigma^-) >= -tol
    bool rank_match = false;
    bool image_match = false;
    double min_eig_diff = 0.0;
    double min_eig_pinv_diff = 0.0;
    double image_gap = 0.0;  // Frobenius gap between support projectors
    int rank_sigma = 0;
    int rank_psi = 0;

    bool dominant() const {
        return sigma_ge_psi && pinv_psi_ge_sigma && rank_match && image_match;
    }
    explicit operator bool() const { return dominant(); }
};

/// Checks the dominance pair condition that keeps the quadratic power law
/// nonnegative. Throws DimensionMismatch on shape disagreement.
DominanceReport check_dominance(const Matrix& sigma, const Matrix& psi,
                                double rank_tol = kDefaultRankTol);

/// Phi = (Sigma^{1/2})' Psi^- Sigma^{1/2}. Requires the dominance pair
/// condition; the nonzero eigenvalues of the result are all >= 1 and
/// rank(Phi) = rank(Sigma) = rank(Psi).
Matrix phi_matrix(const Matrix& sigma, const Matrix& psi,
                  double rank_tol = kDefaultRankTol);

/// Draw mean + Sigma^{1/2} z with z an n-vector of standard normals.
/// The sample lies exactly on the affine support of Sigma.
Vector sample_degenerate_gaussian(const Vector& mean,
                                  const SpectralFactorization& f,
                                  RandomSource& rng);
Vector sample_degenerate_gaussian(const Vector& mean, const Matrix& sigma,
                                  RandomSource& rng);

/// Log density on the rank(Sigma)-dimensional affine support; diagnostics
/// only. Returns -inf if x leaves the support by more than the tolerance.
double logpdf_on_support(const Vector& mean, const SpectralFactorization& f,
                         const Vector& x, double support_tol = 1e-8);

/// Random dominance pair with prescribed rank, built Phi-first: the Phi
/// eigenvalues (all >= 1) and a rotation are drawn, then Psi is derived
/// from Sigma on the shared support, so both dominance inequalities hold
/// by construction. Validation / test support.
struct DominantPair {
    Matrix sigma;
    Matrix psi;
    Vector phi_eigs;  // the planted eigenvalues, unsorted
    int rank = 0;
};
DominantPair random_dominant_pair(int dim, int rank, RandomSource& rng);

}  // namespace psd
}  // namespace remest

#endif  // REMEST_PSDLIN_HPP
