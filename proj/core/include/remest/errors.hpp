#ifndef REMEST_ERRORS_HPP
#define REMEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace remest {

/// Base class for all remest error conditions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix fails the symmetry tolerance check.
class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// Matrix has an eigenvalue below the negative tolerance band.
class NotPsd : public Error {
public:
    using Error::Error;
};

/// Pseudo-determinant requested for a rank-zero matrix.
class ZeroMatrix : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The (Sigma, Psi) pair violates Sigma >= Psi or Psi^- >= Sigma^-.
class DominanceViolation : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration exceeded its iteration budget.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Transmission power below zero reached the channel.
class NegativePower : public Error {
public:
    using Error::Error;
};

class FadingNotConfigured : public Error {
public:
    using Error::Error;
};

/// Innovation has a non-negligible component outside the support of Sigma.
class SupportViolation : public Error {
public:
    using Error::Error;
};

/// Budget calibration (bisection) failed to meet the target tolerance.
class CalibrationFailure : public Error {
public:
    using Error::Error;
};

/// Configuration file or model file is malformed or inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace remest

#endif  // REMEST_ERRORS_HPP
