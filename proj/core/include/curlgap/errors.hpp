#pragma once

#include <stdexcept>
#include <string>

namespace curlgap {

// Argument outside the mathematical domain of a function (x <= 0 for K1, mu
// outside (w0, winf), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation at (or numerically at) a pole of a ratio function.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Argument beyond the range where an evaluation is implemented.
class OverflowGuardError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A documented precondition or model hypothesis does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An inequality of the gap construction chain fails. `inequality()` names it.
class ChainViolation : public PreconditionError {
 public:
  ChainViolation(std::string inequality, const std::string& what)
      : PreconditionError(what), inequality_(std::move(inequality)) {}
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

// First spectral gap of the periodic operator is closed.
class GapClosedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Bands beyond the computed ones might reach below the essential tail.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root not found in the guaranteed bracket.
class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two fields or operators live on different grids.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace curlgap
