#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srlab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (n = 0, s < 3, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Expression text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected = {})
      : Error(what), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Domain violation while evaluating an expression (log of non-positive, 1/0, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Symbolic differentiation reached abs/min/max depending on the variable.
class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

/// Input data breaks a structural requirement (asymmetric weight, bad mesh, bad config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Line-oriented text input rejected; carries the 1-based line number.
class FormatError : public ValidationError {
 public:
  FormatError(const std::string& what, int line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Factorization or iteration failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A value that must lie in the resolvent set coincides (numerically) with an eigenvalue,
/// or a requested spectral gap does not exist.
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace srlab
