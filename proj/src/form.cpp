#include "weylsys/form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "weylsys/errors.hpp"

namespace weylsys {
namespace {

Integer factorial(int n) {
  Integer out = 1;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

/// Multiplicities of each distinct index in a sorted multiset.
std::vector<int> multiplicities(const std::vector<int>& sorted) {
  std::vector<int> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back(static_cast<int>(j - i));
    i = j;
  }
  return out;
}

Integer orderings(const std::vector<int>& sorted) {
  Integer out = factorial(static_cast<int>(sorted.size()));
  for (int m : multiplicities(sorted)) out /= factorial(m);
  return out;
}

}  // namespace

Form Form::from_monomials(std::vector<Monomial> monomials, int num_vars, int degree) {
  if (num_vars < 1) throw InputError("a form needs at least one variable");
  if (degree < 2) throw InputError("form degree must be at least 2, got " + std::to_string(degree));
  std::map<std::vector<int>, Integer> merged;
  for (auto& m : monomials) {
    if (static_cast<int>(m.indices.size()) != degree) {
      throw InputError("degree mismatch: monomial of degree " + std::to_string(m.indices.size()) +
                       " in a form of degree " + std::to_string(degree));
    }
    for (int idx : m.indices) {
      if (idx < 0 || idx >= num_vars) {
        throw InputError("variable index " + std::to_string(idx + 1) + " out of range 1.." +
                         std::to_string(num_vars));
      }
    }
    std::sort(m.indices.begin(), m.indices.end());
    merged[m.indices] += Integer(static_cast<long>(m.coefficient));
  }
  std::vector<Monomial> canonical;
  for (auto& [indices, coeff] : merged) {
    if (coeff == 0) continue;
    if (!coeff.fits_slong_p()) throw InputError("coefficient exceeds 64-bit range");
    canonical.push_back(Monomial{indices, coeff.get_si()});
  }
  return Form(std::move(canonical), num_vars, degree);
}

Form Form::zero(int num_vars, int degree) { return from_monomials({}, num_vars, degree); }

Rational Form::coefficient(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != degree_) throw InputError("tensor index has wrong length");
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  auto it = std::lower_bound(monomials_.begin(), monomials_.end(), sorted,
                             [](const Monomial& m, const std::vector<int>& key) { return m.indices < key; });
  if (it == monomials_.end() || it->indices != sorted) return 0;
  Rational c(Integer(static_cast<long>(it->coefficient)), orderings(sorted));
  c.canonicalize();
  return c;
}

std::map<std::vector<int>, Rational> Form::sym_tensor() const {
  std::map<std::vector<int>, Rational> out;
  for (const auto& m : monomials_) {
    Rational c(Integer(static_cast<long>(m.coefficient)), orderings(m.indices));
    c.canonicalize();
    out.emplace(m.indices, c);
  }
  return out;
}

std::int64_t Form::scaled_entry(const Monomial& m, int degree) {
  // d! * coefficient / orderings = coefficient * prod(multiplicity!)
  (void)degree;
  Integer v(static_cast<long>(m.coefficient));
  for (int mult : multiplicities(m.indices)) v *= factorial(mult);
  if (!v.fits_slong_p()) throw InputError("scaled tensor entry exceeds 64-bit range");
  return v.get_si();
}

Rational Form::eval(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != num_vars_) throw InputError("point length does not match variable count");
  Rational total = 0;
  for (const auto& m : monomials_) {
    Rational term(Integer(static_cast<long>(m.coefficient)));
    for (int idx : m.indices) term *= x[idx];
    total += term;
  }
  return total;
}

Integer Form::eval(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != num_vars_) throw InputError("point length does not match variable count");
  Integer total = 0;
  for (const auto& m : monomials_) {
    Integer term(static_cast<long>(m.coefficient));
    for (int idx : m.indices) term *= static_cast<long>(x[idx]);
    total += term;
  }
  return total;
}

Rational Form::eval_via_tensor(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != num_vars_) throw InputError("point length does not match variable count");
  double terms = std::pow(static_cast<double>(num_vars_), degree_);
  if (terms > 1e7) throw InputError("tensor evaluation too large");
  std::vector<int> tuple(static_cast<std::size_t>(degree_), 0);
  Rational total = 0;
  for (;;) {
    Rational c = coefficient(tuple);
    if (c != 0) {
      for (int idx : tuple) c *= x[idx];
      total += c;
    }
    int k = degree_ - 1;
    while (k >= 0 && ++tuple[k] == num_vars_) tuple[k--] = 0;
    if (k < 0) break;
  }
  return total;
}

RationalVector Form::gradient(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != num_vars_) throw InputError("point length does not match variable count");
  RationalVector grad(static_cast<std::size_t>(num_vars_), Rational(0));
  for (const auto& m : monomials_) {
    const auto& idx = m.indices;
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j < idx.size() && idx[j] == idx[i]) ++j;
      // d/dx_v of x_v^mult * rest = mult * x_v^(mult-1) * rest
      Rational term(Integer(static_cast<long>(m.coefficient)) * static_cast<long>(j - i));
      for (std::size_t k = 0; k < idx.size(); ++k)
        if (k != i) term *= x[idx[k]];
      grad[static_cast<std::size_t>(idx[i])] += term;
      i = j;
    }
  }
  return grad;
}

std::vector<int> Form::occurring_variables() const {
  std::vector<int> vars;
  for (const auto& m : monomials_) vars.insert(vars.end(), m.indices.begin(), m.indices.end());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

FormSystem::FormSystem(std::vector<Form> forms) : forms_(std::move(forms)) {
  if (forms_.empty()) throw InputError("a system needs at least one form");
  for (const auto& f : forms_) {
    if (f.num_vars() != forms_.front().num_vars() || f.degree() != forms_.front().degree()) {
      throw InputError("all forms of a system must share variable count and degree");
    }
  }
}

PencilVector::PencilVector(IntVector a) : a_(std::move(a)) {
  const std::int64_t g = gcd_of(a_);
  if (g == 0) throw InputError("pencil vector must not be zero");
  const auto first = std::find_if(a_.begin(), a_.end(), [](std::int64_t v) { return v != 0; });
  const std::int64_t sign = *first < 0 ? -1 : 1;
  for (auto& v : a_) v = v / g * sign;
}

Form pencil_combine(const FormSystem& system, std::span<const std::int64_t> a) {
  if (static_cast<int>(a.size()) != system.num_forms()) throw InputError("pencil vector length does not match r");
  std::map<std::vector<int>, Integer> acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (const auto& m : system[i].monomials()) {
      acc[m.indices] += Integer(static_cast<long>(m.coefficient)) * static_cast<long>(a[i]);
    }
  }
  std::vector<Monomial> monomials;
  for (auto& [idx, c] : acc) {
    if (c == 0) continue;
    if (!c.fits_slong_p()) throw InputError("pencil combination coefficient exceeds 64-bit range");
    monomials.push_back(Monomial{idx, c.get_si()});
  }
  return Form::from_monomials(std::move(monomials), system.num_vars(), system.degree());
}

Form pencil_combine(const FormSystem& system, const PencilVector& a) { return pencil_combine(system, a.values()); }

LatticeBox::LatticeBox(std::vector<std::pair<Rational, Rational>> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InputError("box needs at least one side");
  for (auto& [l, u] : intervals_) {
    l.canonicalize();
    u.canonicalize();
    if (l < -1 || u > 1) throw InputError("box must lie inside the unit box [-1, 1]^s");
    if (l > u) throw InputError("box side is empty");
  }
}

LatticeBox LatticeBox::unit(int num_vars) {
  return LatticeBox(std::vector<std::pair<Rational, Rational>>(static_cast<std::size_t>(num_vars),
                                                               {Rational(-1), Rational(1)}));
}

LatticeBox LatticeBox::positive_unit(int num_vars) {
  return LatticeBox(std::vector<std::pair<Rational, Rational>>(static_cast<std::size_t>(num_vars),
                                                               {Rational(0), Rational(1)}));
}

std::vector<IntRange> LatticeBox::scaled_ranges(const Rational& scale) const {
  if (scale <= 0) throw InputError("scale P must be positive");
  std::vector<IntRange> out;
  out.reserve(intervals_.size());
  for (const auto& [l, u] : intervals_) {
    const Integer lo = ceil_rational(scale * l);
    const Integer hi = floor_rational(scale * u);
    if (!lo.fits_slong_p() || !hi.fits_slong_p()) throw InputError("scaled box exceeds 64-bit range");
    out.push_back(IntRange{lo.get_si(), hi.get_si()});
  }
  return out;
}

Rational LatticeBox::volume() const {
  Rational v = 1;
  for (const auto& [l, u] : intervals_) v *= (u - l);
  return v;
}

LatticePoints::iterator& LatticePoints::iterator::operator++() {
  for (std::size_t k = point_.size(); k-- > 0;) {
    if (point_[k] < (*ranges_)[k].hi) {
      ++point_[k];
      return *this;
    }
    point_[k] = (*ranges_)[k].lo;
  }
  done_ = true;
  return *this;
}

LatticePoints::iterator LatticePoints::begin() const {
  iterator it;
  for (const auto& r : ranges_)
    if (r.size() == 0) return it;
  it.ranges_ = &ranges_;
  it.done_ = false;
  for (const auto& r : ranges_) it.point_.push_back(r.lo);
  return it;
}

double LatticePoints::count_estimate() const {
  double n = 1;
  for (const auto& r : ranges_) n *= static_cast<double>(r.size());
  return n;
}

std::uint64_t LatticePoints::count() const {
  u128 n = 1;
  for (const auto& r : ranges_) {
    n *= static_cast<u128>(r.size());
    if (n > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("point count exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(n);
}

std::vector<LatticePoints> LatticePoints::partition(std::size_t k) const {
  std::vector<LatticePoints> parts;
  if (ranges_.empty() || ranges_[0].size() == 0 || k == 0) return parts;
  const std::int64_t total = ranges_[0].size();
  const std::int64_t chunks = std::min<std::int64_t>(static_cast<std::int64_t>(k), total);
  std::int64_t lo = ranges_[0].lo;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t len = total / chunks + (c < total % chunks ? 1 : 0);
    auto ranges = ranges_;
    ranges[0] = IntRange{lo, lo + len - 1};
    parts.emplace_back(std::move(ranges));
    lo += len;
  }
  return parts;
}

}  // namespace weylsys
