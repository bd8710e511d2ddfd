#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "weylsys/arith.hpp"

namespace weylsys {

/// Dense row-major matrix over an exact ring.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RationalMatrix = Matrix<Rational>;

/// Fraction-free (Bareiss) elimination with row pivoting and column skipping.
struct BareissResult {
  std::size_t rank = 0;
  /// Original indices of the rows / columns that carried pivots.
  std::vector<std::size_t> pivot_rows;
  std::vector<std::size_t> pivot_cols;
  /// Last nonzero pivot: up to sign, the rank x rank minor on the pivot
  /// rows and columns. 1 when the rank is 0.
  Integer last_pivot = 1;
};

BareissResult bareiss(IntMatrix m);
std::size_t rank(const IntMatrix& m);
Integer determinant(const IntMatrix& m);

struct RrefResult {
  RationalMatrix reduced;
  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> free_cols;
};

RrefResult rref(RationalMatrix m);

/// Primitive integer basis of the right kernel, one vector per free column.
std::vector<std::vector<Integer>> integer_kernel_basis(const RationalMatrix& m);

/// Scales a rational vector to a primitive integer vector (first nonzero
/// entry positive). Zero vectors map to zero.
std::vector<Integer> primitive_integer_vector(const RationalVector& v);

/// Row space over Q grown one row at a time; remembers which inserted rows
/// were independent.
class IncrementalRowSpace {
 public:
  explicit IncrementalRowSpace(std::size_t cols) : cols_(cols) {}

  /// Returns true when the row increased the rank.
  bool insert(const std::vector<Integer>& row);

  std::size_t rank() const noexcept { return independent_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  /// The independent rows, in insertion order.
  const std::vector<std::vector<Integer>>& independent_rows() const noexcept { return independent_; }
  /// Primitive integer kernel basis of the spanned rows.
  std::vector<std::vector<Integer>> kernel() const;

 private:
  std::size_t cols_;
  std::vector<std::vector<Integer>> independent_;
  std::vector<RationalVector> reduced_;
  std::vector<std::size_t> pivots_;
};

/// Solves m * x = b exactly for square nonsingular m.
RationalVector solve(const RationalMatrix& m, const RationalVector& b);

}  // namespace weylsys
