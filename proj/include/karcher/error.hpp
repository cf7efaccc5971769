#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace karcher {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int expected, int actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

/// A matrix failed the positive-definiteness or finiteness check on construction.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain (negative step, empty measure, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (JSON, CSV flags, law descriptions).
class InputError : public Error {
 public:
  using Error::Error;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::optional<double> certified_bound;
};

/// An iterative solver ran out of budget. Carries the report of the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SolveReport report)
      : Error(what), report_(report) {}

  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

}  // namespace karcher
