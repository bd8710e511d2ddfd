#include "weylsys/poly_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "weylsys/errors.hpp"

namespace weylsys {
namespace {

IntTerm term_from_indices(std::int64_t coefficient, const std::vector<int>& sorted) {
  IntTerm t{coefficient, {}};
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    t.powers.emplace_back(sorted[i], static_cast<int>(j - i));
    i = j;
  }
  return t;
}

IntPolynomial polynomial_of(const Form& form) {
  IntPolynomial p;
  for (const auto& m : form.monomials()) p.terms.push_back(term_from_indices(m.coefficient, m.indices));
  return p;
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

}  // namespace

PolySystem::PolySystem(int num_vars, std::vector<IntPolynomial> polys) : num_vars_(num_vars), polys_(std::move(polys)) {
  for (const auto& p : polys_)
    for (const auto& t : p.terms)
      for (const auto& [v, e] : t.powers)
        if (v < 0 || v >= num_vars_ || e < 1) throw InputError("malformed polynomial term");
}

PolySystem PolySystem::from_forms(const FormSystem& system) {
  std::vector<IntPolynomial> polys;
  for (const auto& f : system.forms()) polys.push_back(polynomial_of(f));
  return PolySystem(system.num_vars(), std::move(polys));
}

PolySystem PolySystem::from_form(const Form& form) { return PolySystem(form.num_vars(), {polynomial_of(form)}); }

PolySystem PolySystem::gradient_of(const Form& form) {
  std::vector<std::map<std::vector<int>, Integer>> partials(static_cast<std::size_t>(form.num_vars()));
  for (const auto& m : form.monomials()) {
    const auto& idx = m.indices;
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j < idx.size() && idx[j] == idx[i]) ++j;
      std::vector<int> rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      partials[static_cast<std::size_t>(idx[i])][rest] +=
          Integer(static_cast<long>(m.coefficient)) * static_cast<long>(j - i);
      i = j;
    }
  }
  std::vector<IntPolynomial> polys;
  for (auto& partial : partials) {
    IntPolynomial p;
    for (auto& [rest, c] : partial) {
      if (c == 0) continue;
      if (!c.fits_slong_p()) throw InputError("gradient coefficient exceeds 64-bit range");
      p.terms.push_back(term_from_indices(c.get_si(), rest));
    }
    polys.push_back(std::move(p));
  }
  return PolySystem(form.num_vars(), std::move(polys));
}

std::vector<std::vector<int>> PolySystem::variable_blocks() const {
  std::vector<int> parent(static_cast<std::size_t>(num_vars_));
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& p : polys_) {
    for (const auto& t : p.terms) {
      for (std::size_t k = 1; k < t.powers.size(); ++k) {
        const int a = find_root(parent, t.powers[0].first);
        const int b = find_root(parent, t.powers[k].first);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < num_vars_; ++v) groups[find_root(parent, v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [root, vars] : groups) out.push_back(std::move(vars));
  return out;
}

PolySystem PolySystem::restrict_to(std::span<const int> vars) const {
  std::vector<int> local(static_cast<std::size_t>(num_vars_), -1);
  for (std::size_t k = 0; k < vars.size(); ++k) local[static_cast<std::size_t>(vars[k])] = static_cast<int>(k);
  std::vector<IntPolynomial> polys;
  for (const auto& p : polys_) {
    IntPolynomial q;
    for (const auto& t : p.terms) {
      if (t.powers.empty()) continue;
      if (std::all_of(t.powers.begin(), t.powers.end(), [&](auto ve) { return local[ve.first] >= 0; })) {
        IntTerm lt{t.coefficient, {}};
        for (auto [v, e] : t.powers) lt.powers.emplace_back(local[v], e);
        q.terms.push_back(std::move(lt));
      }
    }
    polys.push_back(std::move(q));
  }
  return PolySystem(static_cast<int>(vars.size()), std::move(polys));
}

std::vector<i128> PolySystem::constants() const {
  std::vector<i128> out;
  for (const auto& p : polys_) {
    i128 c = 0;
    for (const auto& t : p.terms)
      if (t.powers.empty()) c += t.coefficient;
    out.push_back(c);
  }
  return out;
}

double PolySystem::magnitude_bound(std::span<const IntRange> ranges) const {
  double worst = 0;
  for (const auto& p : polys_) {
    double total = 0;
    for (const auto& t : p.terms) {
      double term = std::fabs(static_cast<double>(t.coefficient));
      for (auto [v, e] : t.powers) {
        const auto& r = ranges[static_cast<std::size_t>(v)];
        const double m = std::max(std::fabs(static_cast<double>(r.lo)), std::fabs(static_cast<double>(r.hi)));
        term *= std::pow(m, e);
      }
      total += term;
    }
    worst = std::max(worst, total);
  }
  return worst;
}

i128 PolySystem::eval(int i, std::span<const std::int64_t> x) const {
  i128 total = 0;
  for (const auto& t : polys_[static_cast<std::size_t>(i)].terms) {
    i128 term = t.coefficient;
    for (auto [v, e] : t.powers)
      for (int k = 0; k < e; ++k) term *= x[static_cast<std::size_t>(v)];
    total += term;
  }
  return total;
}

std::int64_t PolySystem::eval_mod(int i, std::span<const std::int64_t> x, std::int64_t m) const {
  std::int64_t total = 0;
  for (const auto& t : polys_[static_cast<std::size_t>(i)].terms) {
    std::int64_t term = mod_floor(t.coefficient, m);
    for (auto [v, e] : t.powers) {
      const std::int64_t xv = mod_floor(x[static_cast<std::size_t>(v)], m);
      for (int k = 0; k < e; ++k) term = static_cast<std::int64_t>(static_cast<i128>(term) * xv % m);
    }
    total += term;
    if (total >= m) total -= m;
  }
  return total;
}

void require_int128_range(const PolySystem& system, std::span<const IntRange> ranges) {
  // Leave headroom for sums of partial evaluations across blocks.
  if (!(system.magnitude_bound(ranges) < 1e36)) {
    throw InputError("polynomial values over this box may exceed the 128-bit evaluation range");
  }
}

}  // namespace weylsys
