#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "weylsys/arith.hpp"

namespace weylsys {

/// One term c * x_{i1} * ... * x_{id}. Indices are 0-based variable ids; the
/// multiset is kept sorted.
struct Monomial {
  std::vector<int> indices;
  std::int64_t coefficient = 0;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// A homogeneous integer form of degree d >= 2 in s variables.
///
/// The form keeps its canonical integer monomial list (sorted, like terms
/// merged, zero terms dropped) and exposes the symmetric coefficient tensor
///   F(x) = sum over ordered (j1..jd) of c_{j1..jd} x_{j1}...x_{jd},
/// whose entries are rationals with denominator dividing d!. Immutable.
class Form {
 public:
  /// Validates indices and homogeneity, then canonicalizes.
  /// Throws InputError on index out of range, degree mismatch or d < 2.
  static Form from_monomials(std::vector<Monomial> monomials, int num_vars, int degree);

  static Form zero(int num_vars, int degree);

  int num_vars() const noexcept { return num_vars_; }
  int degree() const noexcept { return degree_; }
  bool is_zero() const noexcept { return monomials_.empty(); }
  const std::vector<Monomial>& monomials() const noexcept { return monomials_; }

  /// Symmetric tensor entry for any (unsorted) index tuple of length d.
  Rational coefficient(std::span<const int> indices) const;

  /// Entries for sorted tuples j1 <= ... <= jd only.
  std::map<std::vector<int>, Rational> sym_tensor() const;

  /// d! * c for one ordered tuple; always an integer.
  static std::int64_t scaled_entry(const Monomial& m, int degree);

  Rational eval(std::span<const Rational> x) const;
  Integer eval(std::span<const std::int64_t> x) const;
  Rational eval_via_tensor(std::span<const Rational> x) const;

  RationalVector gradient(std::span<const Rational> x) const;

  /// Variables that occur in at least one monomial.
  std::vector<int> occurring_variables() const;

  friend bool operator==(const Form&, const Form&) = default;

 private:
  Form(std::vector<Monomial> monomials, int num_vars, int degree)
      : monomials_(std::move(monomials)), num_vars_(num_vars), degree_(degree) {}

  std::vector<Monomial> monomials_;
  int num_vars_ = 0;
  int degree_ = 0;
};

/// r >= 1 forms sharing s and d.
class FormSystem {
 public:
  explicit FormSystem(std::vector<Form> forms);

  int num_vars() const noexcept { return forms_.front().num_vars(); }
  int degree() const noexcept { return forms_.front().degree(); }
  int num_forms() const noexcept { return static_cast<int>(forms_.size()); }
  const Form& operator[](std::size_t i) const { return forms_.at(i); }
  const std::vector<Form>& forms() const noexcept { return forms_; }

  friend bool operator==(const FormSystem&, const FormSystem&) = default;

 private:
  std::vector<Form> forms_;
};

/// Nonzero integer vector, divided by its gcd with first nonzero entry positive.
class PencilVector {
 public:
  explicit PencilVector(IntVector a);

  const IntVector& values() const noexcept { return a_; }
  std::size_t size() const noexcept { return a_.size(); }
  std::int64_t operator[](std::size_t i) const { return a_.at(i); }

  friend bool operator==(const PencilVector&, const PencilVector&) = default;

 private:
  IntVector a_;
};

/// sum a_i F_i with exact coefficients.
Form pencil_combine(const FormSystem& system, std::span<const std::int64_t> a);
Form pencil_combine(const FormSystem& system, const PencilVector& a);

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  std::int64_t size() const noexcept { return hi < lo ? 0 : hi - lo + 1; }
};

/// Axis-parallel box with rational sides inside [-1, 1]^s.
class LatticeBox {
 public:
  explicit LatticeBox(std::vector<std::pair<Rational, Rational>> intervals);

  static LatticeBox unit(int num_vars);  ///< [-1, 1]^s
  static LatticeBox positive_unit(int num_vars);  ///< [0, 1]^s

  int dim() const noexcept { return static_cast<int>(intervals_.size()); }
  const std::vector<std::pair<Rational, Rational>>& intervals() const noexcept { return intervals_; }

  /// ceil(P*l_j) .. floor(P*u_j) per coordinate.
  std::vector<IntRange> scaled_ranges(const Rational& scale) const;

  Rational volume() const;

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

 private:
  std::vector<std::pair<Rational, Rational>> intervals_;
};

/// Integer points of a product of ranges in lexicographic order.
/// The outermost coordinate can be split into disjoint chunks.
class LatticePoints {
 public:
  explicit LatticePoints(std::vector<IntRange> ranges) : ranges_(std::move(ranges)) {}
  LatticePoints(const LatticeBox& box, const Rational& scale) : ranges_(box.scaled_ranges(scale)) {}

  class iterator {
   public:
    using value_type = IntVector;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const IntVector& operator*() const { return point_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || point_ == o.point_); }

   private:
    friend class LatticePoints;
    const std::vector<IntRange>* ranges_ = nullptr;
    IntVector point_;
    bool done_ = true;
  };

  iterator begin() const;
  iterator end() const { return {}; }

  /// Total number of points (saturating double for cost estimates).
  double count_estimate() const;
  std::uint64_t count() const;

  const std::vector<IntRange>& ranges() const noexcept { return ranges_; }

  /// Splits the first coordinate into at most k contiguous chunks.
  std::vector<LatticePoints> partition(std::size_t k) const;

 private:
  std::vector<IntRange> ranges_;
};

}  // namespace weylsys
