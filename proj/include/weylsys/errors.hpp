#pragma once

#include <stdexcept>
#include <string>

namespace weylsys {

/// Malformed input: bad degree, index out of range, syntax error, dimension mismatch.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An enumeration would exceed the configured cost ceiling.
class FeasibilityError : public std::runtime_error {
 public:
  FeasibilityError(const std::string& what, double estimated_cost, double ceiling)
      : std::runtime_error(what + ": estimated cost " + format(estimated_cost) +
                           " exceeds ceiling " + format(ceiling)),
        estimated_cost_(estimated_cost),
        ceiling_(ceiling) {}

  double estimated_cost() const noexcept { return estimated_cost_; }
  double ceiling() const noexcept { return ceiling_; }

 private:
  static std::string format(double v);

  double estimated_cost_;
  double ceiling_;
};

}  // namespace weylsys
