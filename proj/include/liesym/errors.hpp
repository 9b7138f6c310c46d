#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liesym {

/// Malformed user input: expression text, spec files, CLI bindings.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UndeclaredSymbol : public InputError {
 public:
  UndeclaredSymbol(const std::string& symbol, std::size_t position)
      : InputError("undeclared symbol '" + symbol + "' at position " + std::to_string(position)),
        symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Explicit independent variable found where an autonomous equation was required.
class NonAutonomous : public InputError {
 public:
  using InputError::InputError;
};

/// A parameter assignment annihilates a polynomial the solver divided by.
class GenericityViolation : public InputError {
 public:
  using InputError::InputError;
};

/// Total derivative would exceed the configured jet order.
class OrderOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponent exceeded KernelLimits::max_exponent.
class ExponentOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed (linearity, exact division, ...). Indicates a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace liesym
