#pragma once

#include <stdexcept>
#include <string>

namespace mpsg {

/// Two grid functions (or a function and an operator) live on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bottom (-inf) value reached an operation defined only on finite functions.
class BottomValueError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An explicit scheme was asked to take a step that breaks its CFL or
/// monotonicity bound.
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A semigroup construction was refused because a sampled precondition check
/// failed (commutation, invariance, inverse consistency).
class ConstructionRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& detail, std::size_t line, const std::string& source = {})
      : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + detail),
        detail_(detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

}  // namespace mpsg
