#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace varmin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model returned a non-finite value, or was called with non-finite input.
class ModelEvaluationError : public Error {
 public:
  using Error::Error;
};

/// A model violates a structural requirement (asymmetric Hessian, bad dimension).
class ModelDefinitionError : public Error {
 public:
  using Error::Error;
};

/// Unknown catalog name or parameter.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration for the conjugate velocity did not reach the tolerance.
class ConjugateSolveError : public Error {
 public:
  ConjugateSolveError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A standing assumption (positive definite velocity Hessian) failed at runtime.
class ConditionViolationError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition of an operation.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The reference Hamiltonian flow blew up (empirical failure of completeness).
class CompletenessError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string format_point(const Vec& v);

}  // namespace varmin
