#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hctab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or argument that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed instance text. Carries the 1-based line and the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field '" + field +
              "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Operation requires a budget-feasible partition but got an infeasible one.
class InfeasiblePartition : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search refused because the state space exceeds the cap.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace hctab
