#include "weylsys/linalg.hpp"

#include <algorithm>
#include <utility>

#include "weylsys/errors.hpp"

namespace weylsys {
namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

struct BareissState {
  BareissResult result;
  int sign = 1;
};

BareissState run_bareiss(IntMatrix& m) {
  BareissState st;
  const std::size_t n = m.rows();
  const std::size_t c = m.cols();
  std::vector<std::size_t> row_id(n);
  for (std::size_t i = 0; i < n; ++i) row_id[i] = i;
  Integer prev = 1;
  std::size_t k = 0;
  for (std::size_t col = 0; col < c && k < n; ++col) {
    std::size_t p = k;
    while (p < n && m(p, col) == 0) ++p;
    if (p == n) continue;
    if (p != k) {
      swap_rows(m, p, k);
      std::swap(row_id[p], row_id[k]);
      st.sign = -st.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = col + 1; j < c; ++j) {
        Integer v = m(i, j) * m(k, col) - m(i, col) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, col) = 0;
    }
    prev = m(k, col);
    st.result.pivot_rows.push_back(row_id[k]);
    st.result.pivot_cols.push_back(col);
    ++k;
  }
  st.result.rank = k;
  st.result.last_pivot = prev;
  return st;
}

}  // namespace

BareissResult bareiss(IntMatrix m) { return run_bareiss(m).result; }

std::size_t rank(const IntMatrix& m) { return bareiss(m).rank; }

Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant of a non-square matrix");
  if (m.rows() == 0) return 1;
  IntMatrix work = m;
  const auto st = run_bareiss(work);
  if (st.result.rank < m.rows()) return 0;
  return st.sign * st.result.last_pivot;
}

RrefResult rref(RationalMatrix m) {
  RrefResult out;
  const std::size_t n = m.rows();
  const std::size_t c = m.cols();
  std::size_t row = 0;
  for (std::size_t col = 0; col < c; ++col) {
    std::size_t p = row;
    while (p < n && m(p, col) == 0) ++p;
    if (p == n) {
      out.free_cols.push_back(col);
      continue;
    }
    for (std::size_t j = 0; j < c; ++j) std::swap(m(p, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < c; ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = col; j < c; ++j) m(i, j) -= f * m(row, j);
    }
    out.pivot_cols.push_back(col);
    if (++row == n) {
      for (std::size_t rest = col + 1; rest < c; ++rest) out.free_cols.push_back(rest);
      break;
    }
  }
  out.reduced = std::move(m);
  return out;
}

std::vector<Integer> primitive_integer_vector(const RationalVector& v) {
  Integer lcm_den = 1;
  for (const auto& x : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<Integer> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(Integer(x * lcm_den));
  const Integer g = gcd_of(out);
  if (g == 0) return out;
  const auto first = std::find_if(out.begin(), out.end(), [](const Integer& x) { return x != 0; });
  const Integer scale = (*first < 0) ? Integer(-g) : g;
  for (auto& x : out) x /= scale;
  return out;
}

std::vector<std::vector<Integer>> integer_kernel_basis(const RationalMatrix& m) {
  const auto r = rref(m);
  std::vector<std::vector<Integer>> basis;
  for (std::size_t f : r.free_cols) {
    RationalVector v(m.cols(), Rational(0));
    v[f] = 1;
    for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) v[r.pivot_cols[k]] = -r.reduced(k, f);
    basis.push_back(primitive_integer_vector(v));
  }
  return basis;
}

bool IncrementalRowSpace::insert(const std::vector<Integer>& row) {
  if (row.size() != cols_) throw InputError("row length does not match");
  if (independent_.size() == cols_) return false;
  RationalVector r(row.begin(), row.end());
  for (std::size_t k = 0; k < reduced_.size(); ++k) {
    const Rational f = r[pivots_[k]];
    if (f == 0) continue;
    for (std::size_t j = 0; j < cols_; ++j) r[j] -= f * reduced_[k][j];
  }
  const auto it = std::find_if(r.begin(), r.end(), [](const Rational& x) { return x != 0; });
  if (it == r.end()) return false;
  const auto pivot = static_cast<std::size_t>(it - r.begin());
  const Rational inv = 1 / r[pivot];
  for (auto& x : r) x *= inv;
  for (auto& other : reduced_) {
    const Rational f = other[pivot];
    if (f == 0) continue;
    for (std::size_t j = 0; j < cols_; ++j) other[j] -= f * r[j];
  }
  reduced_.push_back(std::move(r));
  pivots_.push_back(pivot);
  independent_.push_back(row);
  return true;
}

std::vector<std::vector<Integer>> IncrementalRowSpace::kernel() const {
  RationalMatrix m(reduced_.size(), cols_);
  for (std::size_t i = 0; i < reduced_.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = reduced_[i][j];
  return integer_kernel_basis(m);
}

RationalVector solve(const RationalMatrix& m, const RationalVector& b) {
  const std::size_t n = m.rows();
  if (m.cols() != n || b.size() != n) throw InputError("solve needs a square system");
  RationalMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n) = b[i];
  }
  const auto r = rref(std::move(aug));
  if (r.pivot_cols.size() < n || r.pivot_cols.back() != n - 1) throw InputError("singular system");
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r.reduced(i, n);
  return x;
}

}  // namespace weylsys
