#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liftpdb {

// Malformed or unsupported query text/structure.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query syntax error with 1-based source position.
class SyntaxError : public QueryError {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : QueryError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Bad input data: files, probabilities, unknown entities, oversized oracles.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal guarantee did not hold. Never expected in a correct build.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace liftpdb
