#pragma once

#include <stdexcept>
#include <string>

namespace remest {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numeric input violates a domain invariant (non-finite, non-SPD, out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

}  // namespace remest
