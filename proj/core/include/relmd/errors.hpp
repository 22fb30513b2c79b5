#pragma once

#include <stdexcept>
#include <string>

namespace relmd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a reference function, or inputs are
/// non-finite or of mismatched dimension.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unsupported configuration (bad constants, unsupported
/// geometry/set pair, missing prox for a composite term).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An inner numeric solver failed to converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// No point of the feasible set satisfies the functional constraint.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace relmd
