#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "weylsys/arith.hpp"
#include "weylsys/form.hpp"

namespace weylsys {

/// coefficient * prod x_var^exp. An empty power list is a constant term.
struct IntTerm {
  std::int64_t coefficient = 0;
  std::vector<std::pair<int, int>> powers;
};

struct IntPolynomial {
  std::vector<IntTerm> terms;
};

/// A list of integer polynomials in s variables, not necessarily homogeneous.
/// This is the representation every enumeration kernel evaluates: forms,
/// pencil combinations and gradient systems all compile to it.
class PolySystem {
 public:
  PolySystem(int num_vars, std::vector<IntPolynomial> polys);

  static PolySystem from_forms(const FormSystem& system);
  static PolySystem from_form(const Form& form);
  /// The s partial derivatives of a form.
  static PolySystem gradient_of(const Form& form);

  int num_vars() const noexcept { return num_vars_; }
  int size() const noexcept { return static_cast<int>(polys_.size()); }
  const std::vector<IntPolynomial>& polys() const noexcept { return polys_; }

  /// Partition of the variables into connected components of the
  /// "appear in a common term" relation, across all polynomials. Each block
  /// is sorted; blocks are ordered by smallest variable.
  std::vector<std::vector<int>> variable_blocks() const;

  /// The terms of every polynomial that involve only `vars`, re-indexed to
  /// local positions 0..vars.size()-1. Constant terms are dropped.
  PolySystem restrict_to(std::span<const int> vars) const;

  /// Sum of constant terms per polynomial.
  std::vector<i128> constants() const;

  /// Upper bound on max |p(x)| over the given ranges.
  double magnitude_bound(std::span<const IntRange> ranges) const;

  /// Evaluates polynomial i; throws nothing, caller guarantees magnitudes.
  i128 eval(int i, std::span<const std::int64_t> x) const;
  /// Same, reducing every product modulo m (m < 2^31).
  std::int64_t eval_mod(int i, std::span<const std::int64_t> x, std::int64_t m) const;

 private:
  int num_vars_;
  std::vector<IntPolynomial> polys_;
};

/// Throws InputError when values over `ranges` may leave the 128-bit range.
void require_int128_range(const PolySystem& system, std::span<const IntRange> ranges);

}  // namespace weylsys
