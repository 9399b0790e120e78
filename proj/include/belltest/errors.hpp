#pragma once

#include <stdexcept>
#include <string>

namespace belltest {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input (bad CSV row, bad JSON model file). Carries a line number
/// when one is known.
struct ParseError : Error {
  explicit ParseError(const std::string& msg, long line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_number(line) {}
  long line_number;
};

/// Input violates a documented invariant (too few points, duplicate angles,
/// negative rate, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// An argument is outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// A least-squares fit could not be performed (singular system, nonpositive
/// mean rate).
struct FitError : Error {
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace belltest
