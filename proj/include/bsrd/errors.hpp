#pragma once

#include <stdexcept>
#include <string>

namespace bsrd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or degenerate model parameters (non-finite, non-positive, a+b=0).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Coupling coefficients violate (beta1-alpha1)(kappa2-alpha2) - kappa1*beta2 = 0.
class CompatibilityError : public ParameterError {
 public:
  CompatibilityError(const std::string& what, double residual)
      : ParameterError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A stated precondition of an analysis routine does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

/// Config text could not be parsed or contains unknown keys.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Newton or linear solver failure; carries the last residual seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace bsrd
