#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dayflow {

// Base class for all toolkit errors. Subclasses map onto CLI exit codes:
// ConfigError -> 2, DataError -> 3, IntegrityError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters (bad thresholds, weights, paths).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data.
struct DataError : Error {
  using Error::Error;
};

// Parse failure in a line-oriented input; carries the 1-based line number.
struct ParseError : DataError {
  ParseError(std::size_t line_number, const std::string& what)
      : DataError("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  std::size_t line;
};

// Input stream had no content at all.
struct EmptyInputError : DataError {
  using DataError::DataError;
};

// An internal invariant was violated; indicates a bug, not bad input.
struct IntegrityError : Error {
  using Error::Error;
};

}  // namespace dayflow
