#include "remest/psdlin.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace remest::psd {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": expected square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionMismatch(os.str());
    }
}

void require_symmetric(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            const double gap = std::abs(m(i, j) - m(j, i));
            if (gap > kSymmetryTol * (1.0 + std::abs(m(i, j)))) {
                std::ostringstream os;
                os << "symmetry violated at (" << i << "," << j << "): gap " << gap;
                throw NotSymmetric(os.str());
            }
        }
    }
}

}  // namespace

SpectralFactorization spectral(const Matrix& m, double rank_tol) {
    require_square(m, "spectral");
    require_symmetric(m);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
    if (solver.info() != Eigen::Success) {
        throw NotPsd("eigendecomposition failed to converge");
    }

    const Eigen::Index n = m.rows();
    // Eigen returns ascending order; flip to descending.
    SpectralFactorization f;
    f.u.resize(n, n);
    f.d.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        f.d[i] = solver.eigenvalues()[n - 1 - i];
        f.u.col(i) = solver.eigenvectors().col(n - 1 - i);
    }

    // Relative negative band with an absolute floor, so matrices that are
    // zero up to roundoff do not trip the check.
    const double max_abs = f.d.size() > 0 ? f.d.cwiseAbs().maxCoeff() : 0.0;
    if (f.d.size() > 0 && f.d[n - 1] < -rank_tol * std::max(max_abs, 1.0)) {
        std::ostringstream os;
        os << "matrix is not PSD: min eigenvalue " << f.d[n - 1];
        throw NotPsd(os.str());
    }

    const double cutoff = rank_tol * std::max(max_abs, 0.0);
    f.rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (f.d[i] > cutoff) {
            ++f.rank;
        } else {
            f.d[i] = 0.0;
        }
    }
    return f;
}

Matrix pseudo_inverse(const SpectralFactorization& f) {
    Vector dinv = Vector::Zero(f.d.size());
    for (int i = 0; i < f.rank; ++i) dinv[i] = 1.0 / f.d[i];
    return f.u * dinv.asDiagonal() * f.u.transpose();
}

Matrix pseudo_inverse(const Matrix& m, double rank_tol) {
    return pseudo_inverse(spectral(m, rank_tol));
}

double pseudo_det(const SpectralFactorization& f) {
    if (f.rank == 0) {
        throw ZeroMatrix("pseudo-determinant undefined for the zero matrix");
    }
    double p = 1.0;
    for (int i = 0; i < f.rank; ++i) p *= f.d[i];
    return p;
}

double pseudo_det(const Matrix& m, double rank_tol) {
    return pseudo_det(spectral(m, rank_tol));
}

Matrix sqrt_factor(const SpectralFactorization& f) {
    return f.u * f.d.cwiseSqrt().asDiagonal();
}

Matrix sqrt_factor(const Matrix& m, double rank_tol) {
    return sqrt_factor(spectral(m, rank_tol));
}

DominanceReport check_dominance(const Matrix& sigma, const Matrix& psi,
                                double rank_tol) {
    require_square(sigma, "check_dominance");
    if (sigma.rows() != psi.rows() || sigma.cols() != psi.cols()) {
        throw DimensionMismatch("check_dominance: Sigma and Psi dimensions differ");
    }

    const SpectralFactorization fs = spectral(sigma, rank_tol);
    const SpectralFactorization fp = spectral(psi, rank_tol);

    DominanceReport rep;
    rep.rank_sigma = fs.rank;
    rep.rank_psi = fp.rank;

    const double scale = std::max({1.0, fs.d.size() ? fs.d[0] : 0.0,
                                   fp.d.size() ? fp.d[0] : 0.0});
    const double tol = 1e-8 * scale;

    Eigen::SelfAdjointEigenSolver<Matrix> diff(sigma - psi,
                                               Eigen::EigenvaluesOnly);
    rep.min_eig_diff = diff.eigenvalues().minCoeff();
    rep.sigma_ge_psi = rep.min_eig_diff >= -tol;

    const Matrix sigma_pinv = pseudo_inverse(fs);
    const Matrix psi_pinv = pseudo_inverse(fp);
    const double inv_scale =
        std::max({1.0, fs.rank ? 1.0 / fs.d[fs.rank - 1] : 0.0,
                  fp.rank ? 1.0 / fp.d[fp.rank - 1] : 0.0});
    Eigen::SelfAdjointEigenSolver<Matrix> idiff(psi_pinv - sigma_pinv,
                                                Eigen::EigenvaluesOnly);
    rep.min_eig_pinv_diff = idiff.eigenvalues().minCoeff();
    rep.pinv_psi_ge_sigma = rep.min_eig_pinv_diff >= -1e-8 * inv_scale;

    rep.rank_match = fs.rank == fp.rank;
    rep.image_gap = (fs.support_projector() - fp.support_projector()).norm();
    rep.image_match = rep.image_gap <= 1e-6 * std::max(1, fs.dim());
    return rep;
}

Matrix phi_matrix(const Matrix& sigma, const Matrix& psi, double rank_tol) {
    const DominanceReport rep = check_dominance(sigma, psi, rank_tol);
    if (!rep.dominant()) {
        std::ostringstream os;
        os << "dominance pair condition violated: min eig(Sigma-Psi)="
           << rep.min_eig_diff << ", min eig(Psi^- - Sigma^-)="
           << rep.min_eig_pinv_diff << ", ranks " << rep.rank_sigma << "/"
           << rep.rank_psi << ", image gap " << rep.image_gap;
        throw DominanceViolation(os.str());
    }
    const Matrix s = sqrt_factor(sigma, rank_tol);
    const Matrix psi_pinv = pseudo_inverse(psi, rank_tol);
    return s.transpose() * psi_pinv * s;
}

Vector sample_degenerate_gaussian(const Vector& mean,
                                  const SpectralFactorization& f,
                                  RandomSource& rng) {
    if (mean.size() != f.d.size()) {
        throw DimensionMismatch("sample: mean dimension does not match Sigma");
    }
    Vector x = mean;
    // Columns past the rank carry a zero factor; their normals are still
    // drawn so the stream consumption does not depend on the rank.
    for (int i = 0; i < f.dim(); ++i) {
        const double z = rng.normal();
        if (i < f.rank) x += std::sqrt(f.d[i]) * z * f.u.col(i);
    }
    return x;
}

Vector sample_degenerate_gaussian(const Vector& mean, const Matrix& sigma,
                                  RandomSource& rng) {
    return sample_degenerate_gaussian(mean, spectral(sigma), rng);
}

DominantPair random_dominant_pair(int dim, int rank, RandomSource& rng) {
    if (rank < 1 || rank > dim) {
        throw DimensionMismatch("random_dominant_pair: rank out of range");
    }
    auto random_orthogonal = [&rng](int size) {
        Matrix g(size, size);
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) g(i, j) = rng.normal();
        }
        return Matrix(Eigen::HouseholderQR<Matrix>(g).householderQ());
    };

    const Matrix u = random_orthogonal(dim).leftCols(rank);
    Vector sig_eigs(rank), phi_eigs(rank);
    for (int i = 0; i < rank; ++i) sig_eigs[i] = 0.5 + 4.5 * rng.uniform01();
    for (int i = 0; i < rank; ++i) phi_eigs[i] = 1.0 + 4.0 * rng.uniform01();
    const Matrix v = random_orthogonal(rank);

    DominantPair pair;
    pair.rank = rank;
    pair.phi_eigs = phi_eigs;
    pair.sigma = u * sig_eigs.asDiagonal() * u.transpose();
    const Matrix s = u * sig_eigs.cwiseSqrt().asDiagonal();
    pair.psi = s * v * phi_eigs.cwiseInverse().asDiagonal() * v.transpose() *
               s.transpose();
    pair.sigma = 0.5 * (pair.sigma + pair.sigma.transpose());
    pair.psi = 0.5 * (pair.psi + pair.psi.transpose());
    return pair;
}

double logpdf_on_support(const Vector& mean, const SpectralFactorization& f,
                         const Vector& x, double support_tol) {
    if (f.rank == 0) {
        return (x - mean).norm() <= support_tol
                   ? 0.0
                   : -std::numeric_limits<double>::infinity();
    }
    const Vector r = x - mean;
    const double scale = std::sqrt(f.d[0]);
    if (f.support_distance(r) > support_tol * std::max(1.0, scale)) {
        return -std::numeric_limits<double>::infinity();
    }
    double logdet = 0.0;
    for (int i = 0; i < f.rank; ++i) logdet += std::log(f.d[i]);
    const double quad = f.quadform_pinv(r);
    return -0.5 * (quad + f.rank * std::log(2.0 * 3.14159265358979323846) + logdet);
}

}  // namespace psd
