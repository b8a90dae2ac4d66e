#pragma once

#include <stdexcept>
#include <string>

namespace sfl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function or kernel was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not converge or exhausted its refinement budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Input matrix is not symmetric within tolerance.
class AsymmetryError : public PreconditionError {
 public:
  AsymmetryError(const std::string& what, double max_asymmetry)
      : PreconditionError(what), max_asymmetry_(max_asymmetry) {}
  double max_asymmetry() const noexcept { return max_asymmetry_; }

 private:
  double max_asymmetry_;
};

/// Matrix is singular (or numerically so) where an inverse/log-determinant was needed.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// Internal cross-check between two independent computations disagreed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace sfl
