#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "hozog/types.hpp"

namespace hozog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySplit : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class SingleClass : public Error {
 public:
  using Error::Error;
};

/// An inner-solver iterate or gradient stopped being finite at step `step`.
class NonFiniteIterate : public Error {
 public:
  explicit NonFiniteIterate(std::size_t step)
      : Error("inner solver produced a non-finite iterate at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// The objective f(lambda) came back NaN or infinite (usually a diverged inner solve).
class NonFiniteObjective : public Error {
 public:
  NonFiniteObjective(HyperParams lambda, const std::string& detail,
                     std::optional<std::size_t> meta_iter = std::nullopt);

  const HyperParams& lambda() const { return lambda_; }
  const std::string& detail() const { return detail_; }
  std::optional<std::size_t> meta_iter() const { return meta_iter_; }

  NonFiniteObjective at_meta_iter(std::size_t k) const {
    return NonFiniteObjective(lambda_, detail_, k);
  }

 private:
  HyperParams lambda_;
  std::string detail_;
  std::optional<std::size_t> meta_iter_;
};

/// Raised by the LIBSVM reader. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              reason),
        line_(line),
        column_(column),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

}  // namespace hozog
