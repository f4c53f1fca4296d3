#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array dimensions do not agree with the grid they are used on.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested configuration cannot exist (e.g. the area bound for vortices).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Stored data violate an invariant that should hold by construction.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// The fields are not resolved well enough by the grid.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A linear or elliptic solve failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A nonlinear iteration stopped before converging.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  /// Residual sup-norm after each iteration.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace vlab
