#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsvm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be turned into a dataset.
class ParseError : public Error {
 public:
  enum class Kind { EmptyInput, Malformed };

  ParseError(Kind kind, std::size_t line, const std::string& what)
      : Error(kind == Kind::EmptyInput ? what : "line " + std::to_string(line) + ": " + what),
        kind_(kind),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// A precondition on arguments was violated (sizes, ranges, signs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic produced something the math rules out: a non-finite objective
/// or a duality gap below the rounding floor.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsvm
