#pragma once

// Shared vocabulary for the aest library: vector/matrix aliases and the
// exception hierarchy used by every module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace aest {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or argument (sizes, profile parameters, unknown names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation precondition that cannot be expressed as
/// configuration, e.g. a non-normalized projector vector.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: eigensolver non-convergence, norm drift, quadrature
/// that does not settle.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aest
