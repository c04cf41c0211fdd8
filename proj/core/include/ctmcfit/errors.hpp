#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctmcfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Valuation or exponent vector with the wrong number of entries.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Broken structural invariant of a model object (negative rate, bad index, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Lexical or syntax error in a model source, with 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Construct that is valid PRISM but outside the supported subset.
class UnsupportedConstructError : public ParseError {
 public:
  UnsupportedConstructError(const std::string& what, std::size_t line, std::size_t column)
      : ParseError("out of subset: " + what, line, column) {}
};

/// Model is syntactically fine but cannot be elaborated or built.
class SemanticError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset file; line is 1-based (0 when not tied to a line).
class DatasetFormatError : public Error {
 public:
  DatasetFormatError(const std::string& message, std::size_t line)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid estimator configuration (bad epsilon, nonpositive initial value, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Estimation cannot proceed, e.g. an observation has zero likelihood.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& message, std::size_t sequence)
      : Error(message), sequence_(sequence) {}

  std::size_t sequence() const noexcept { return sequence_; }

 private:
  std::size_t sequence_;
};

/// Update polynomial with negative constant and no positive term.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical self-check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctmcfit
