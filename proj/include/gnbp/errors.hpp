#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gnbp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization met a pivot at or below the floor.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// J^T J (+ ridge I) could not be factored; the caller should grow the ridge.
class SingularNormalEquations : public NotPositiveDefinite {
 public:
  using NotPositiveDefinite::NotPositiveDefinite;
};

class MissingLabels : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class EmptySplit : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& reason)
      : Error(line == 0 ? "config: " + reason
                        : "config line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MismatchedExperiment : public Error {
 public:
  using Error::Error;
};

}  // namespace gnbp
