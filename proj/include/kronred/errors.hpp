#ifndef KRONRED_ERRORS_HPP
#define KRONRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kronred {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed network description; carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Invariant violation in a programmatically built model.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Exact integer/rational arithmetic exceeded 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The interior block of the partitioned Laplacian is (numerically) singular,
/// e.g. the removed set contains a component with no outflow path to a kept
/// complex. Carries the condition estimate that triggered the failure.
class SingularBlockError : public Error {
 public:
  explicit SingularBlockError(double condition)
      : Error("interior Laplacian block is singular (condition estimate " +
              std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// A reduction was requested that removes every complex.
class EmptyKeptSetError : public Error {
 public:
  EmptyKeptSetError() : Error("reduction would remove every complex") {}
};

/// The right-hand side produced a non-finite derivative component.
class NonFiniteRhsError : public Error {
 public:
  explicit NonFiniteRhsError(int species)
      : Error("non-finite derivative for species index " + std::to_string(species)),
        species_(species) {}
  int species() const { return species_; }

 private:
  int species_;
};

/// pulse_experiment precondition: the supplied pre-pulse state is not an
/// equilibrium of the full model.
class NotAtEquilibriumError : public Error {
 public:
  explicit NotAtEquilibriumError(double residual)
      : Error("pre-pulse state is not an equilibrium (|rhs|_inf = " +
              std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Trajectory does not cover the requested comparison grid.
class GridCoverageError : public Error {
 public:
  using Error::Error;
};

/// An integration run ended in a failure status (positivity loss, step
/// underflow, step cap) where a completed trajectory was required.
class IntegrationError : public Error {
 public:
  explicit IntegrationError(const std::string& reason)
      : Error("integration failed: " + reason), reason_(reason) {}
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kronred

#endif  // KRONRED_ERRORS_HPP
