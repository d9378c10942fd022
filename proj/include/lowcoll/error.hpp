#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lowcoll {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input or a violated precondition. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed event-log or config line; carries the 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Event sequence that cannot be replayed (e.g. collateral underflow).
class LedgerError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No admissible quote exists for the requested parameters.
class QuoteInfeasible : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Training data contains a single class.
class DegenerateLabels : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An internal consistency check failed. Exit code 3.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace lowcoll
