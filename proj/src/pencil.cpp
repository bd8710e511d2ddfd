#include "weylsys/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "weylsys/counting.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/factor.hpp"
#include "weylsys/multilinear.hpp"
#include "weylsys/poly_system.hpp"
#include "weylsys/rng.hpp"

namespace weylsys {
namespace {

void require_quadratic(const Form& form) {
  if (form.degree() != 2) throw InputError("expected a quadratic form, got degree " + std::to_string(form.degree()));
}

IntMatrix combine(const std::vector<IntMatrix>& grams, std::span<const std::int64_t> a) {
  const std::size_t s = grams.front().rows();
  IntMatrix m(s, s);
  for (std::size_t i = 0; i < grams.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t u = 0; u < s; ++u)
      for (std::size_t v = 0; v < s; ++v) m(u, v) += grams[i](u, v) * static_cast<long>(a[i]);
  }
  return m;
}

Integer horner(const std::vector<Integer>& coeffs, const Integer& a1, const Integer& a2) {
  // sum coeffs[k] a1^(n-k) a2^k
  Integer value = 0;
  Integer a2_power = 1;
  const std::size_t n = coeffs.size() - 1;
  std::vector<Integer> a1_powers(n + 1, Integer(1));
  for (std::size_t k = 1; k <= n; ++k) a1_powers[k] = a1_powers[k - 1] * a1;
  for (std::size_t k = 0; k <= n; ++k) {
    value += coeffs[k] * a1_powers[n - k] * a2_power;
    a2_power *= a2;
  }
  return value;
}

bool divides(const Integer& d, const Integer& n) {
  if (d == 0) return n == 0;
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

std::pair<Integer, Integer> normalized_pair(Integer a1, Integer a2) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a1.get_mpz_t(), a2.get_mpz_t());
  a1 /= g;
  a2 /= g;
  if (a1 < 0 || (a1 == 0 && a2 < 0)) {
    a1 = -a1;
    a2 = -a2;
  }
  return {a1, a2};
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

IntMatrix gram_matrix(const Form& form) {
  require_quadratic(form);
  const auto s = static_cast<std::size_t>(form.num_vars());
  IntMatrix g(s, s);
  for (const auto& m : form.monomials()) {
    const auto i = static_cast<std::size_t>(m.indices[0]);
    const auto j = static_cast<std::size_t>(m.indices[1]);
    const Integer c(static_cast<long>(m.coefficient));
    if (i == j) {
      g(i, i) += 2 * c;
    } else {
      g(i, j) += c;
      g(j, i) += c;
    }
  }
  return g;
}

std::size_t rank_quadratic(const Form& form) { return rank(gram_matrix(form)); }

bool BinaryForm::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Integer& c) { return c == 0; });
}

Integer BinaryForm::eval(const Integer& a1, const Integer& a2) const {
  if (coeffs.empty()) return 0;
  return horner(coeffs, a1, a2);
}

std::string BinaryForm::to_string() const {
  std::ostringstream out;
  const int n = degree();
  bool first = true;
  for (int k = 0; k <= n; ++k) {
    const Integer& c = coeffs[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    out << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    const Integer mag = abs(c);
    const int e1 = n - k;
    const int e2 = k;
    const bool bare = e1 == 0 && e2 == 0;
    if (mag != 1 || bare) out << mag.get_str() << (bare ? "" : "*");
    auto power = [&](const char* name, int e, bool need_star) {
      if (e == 0) return;
      if (need_star) out << "*";
      out << name;
      if (e > 1) out << "^" << e;
    };
    power("a1", e1, false);
    power("a2", e2, e1 > 0);
    first = false;
  }
  return first ? "0" : out.str();
}

DiscriminantResult discriminant_binary_form(const Form& f1, const Form& f2) {
  require_quadratic(f1);
  require_quadratic(f2);
  if (f1.num_vars() != f2.num_vars()) throw InputError("forms must share the variable count");
  const IntMatrix g1 = gram_matrix(f1);
  const IntMatrix g2 = gram_matrix(f2);
  const int s = f1.num_vars();
  // p(t) = det(G1 + t G2), sampled at t = 0..s, then Newton interpolation.
  std::vector<Rational> divided(static_cast<std::size_t>(s) + 1);
  for (int t = 0; t <= s; ++t) {
    IntMatrix m(g1.rows(), g1.cols());
    for (std::size_t u = 0; u < m.rows(); ++u)
      for (std::size_t v = 0; v < m.cols(); ++v) m(u, v) = g1(u, v) + t * g2(u, v);
    divided[static_cast<std::size_t>(t)] = Rational(determinant(m));
  }
  for (int level = 1; level <= s; ++level)
    for (int t = s; t >= level; --t)
      divided[static_cast<std::size_t>(t)] =
          (divided[static_cast<std::size_t>(t)] - divided[static_cast<std::size_t>(t - 1)]) / level;
  // Expand sum divided[k] prod_{m<k} (t - m) into the monomial basis.
  std::vector<Rational> poly(static_cast<std::size_t>(s) + 1, Rational(0));
  std::vector<Rational> basis{Rational(1)};
  for (int k = 0; k <= s; ++k) {
    for (std::size_t e = 0; e < basis.size(); ++e) poly[e] += divided[static_cast<std::size_t>(k)] * basis[e];
    std::vector<Rational> next(basis.size() + 1, Rational(0));
    for (std::size_t e = 0; e < basis.size(); ++e) {
      next[e + 1] += basis[e];
      next[e] -= basis[e] * k;
    }
    basis = std::move(next);
  }
  DiscriminantResult out;
  for (auto& c : poly) {
    c.canonicalize();
    if (c.get_den() != 1) throw std::logic_error("non-integral discriminant coefficient");
    out.form.coeffs.push_back(c.get_num());
  }
  out.scaling = 1;
  out.scaling <<= static_cast<mp_bitcnt_t>(s);
  return out;
}

std::vector<std::pair<Integer, Integer>> rational_roots(const BinaryForm& form) {
  if (form.coeffs.empty() || form.is_zero()) throw InputError("the zero binary form has every point as a root");
  std::vector<std::pair<Integer, Integer>> roots;
  const std::size_t n = form.coeffs.size() - 1;
  std::size_t lo = 0;
  while (form.coeffs[lo] == 0) ++lo;
  std::size_t hi = n;
  while (form.coeffs[hi] == 0) --hi;
  if (hi < n) roots.emplace_back(0, 1);  // f(0, 1) = coeffs[n]
  if (lo > 0) roots.emplace_back(1, 0);  // f(1, 0) = coeffs[0]
  std::vector<Integer> g(form.coeffs.begin() + static_cast<std::ptrdiff_t>(lo),
                         form.coeffs.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  if (g.size() > 1) {
    const Integer content = gcd_of(g);
    for (auto& c : g) c /= content;
    const Integer at_one = horner(g, 1, 1);
    const Integer at_minus_one = horner(g, -1, 1);
    // g(x, 1) has leading coefficient g[0] and constant g.back(); x = a1/a2.
    const auto num_candidates = divisors(g.back());
    const auto den_candidates = divisors(g.front());
    for (const auto& a1 : num_candidates) {
      for (const auto& d : den_candidates) {
        for (int sign : {1, -1}) {
          const Integer a2 = sign * d;
          Integer common;
          mpz_gcd(common.get_mpz_t(), a1.get_mpz_t(), a2.get_mpz_t());
          if (common != 1) continue;
          // (a2 x - a1) divides g(x, 1) over Z, so it divides its values.
          if (!divides(a2 - a1, at_one) || !divides(-a2 - a1, at_minus_one)) continue;
          if (horner(g, a1, a2) == 0) roots.push_back(normalized_pair(a1, a2));
        }
      }
    }
  }
  for (const auto& [a1, a2] : roots)
    if (form.eval(a1, a2) != 0) throw std::logic_error("rational root failed verification");
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

PencilRankReport min_pencil_rank_search(const FormSystem& system, int height, std::uint64_t seed,
                                        const Budget& budget) {
  if (system.degree() != 2) throw InputError("pencil rank search needs quadratic forms");
  if (height < 1) throw InputError("search height must be at least 1");
  const int r = system.num_forms();
  const int s = system.num_vars();
  std::vector<IntMatrix> grams;
  for (const auto& f : system.forms()) grams.push_back(gram_matrix(f));

  PencilRankReport report;
  report.search_height = height;
  const double members = std::pow(2.0 * height + 1, r) / 2;
  budget.require(members * std::pow(static_cast<double>(s), 3), "pencil rank search");

  report.min_rank_found = s + 1;
  IntVector a(static_cast<std::size_t>(r), -height);
  for (;;) {
    const auto first = std::find_if(a.begin(), a.end(), [](std::int64_t v) { return v != 0; });
    if (first != a.end() && *first > 0 && gcd_of(a) == 1) {
      ++report.members_checked;
      const int rk = static_cast<int>(rank(combine(grams, a)));
      if (rk < report.min_rank_found) {
        report.min_rank_found = rk;
        report.witness = a;
      }
    }
    int k = r - 1;
    while (k >= 0 && a[static_cast<std::size_t>(k)] == height) a[static_cast<std::size_t>(k--)] = -height;
    if (k < 0) break;
    ++a[static_cast<std::size_t>(k)];
  }

  const CounterRng rng(seed);
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    IntVector b(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) b[static_cast<std::size_t>(i)] = rng.uniform_int(draw, static_cast<std::uint64_t>(i), -1000000, 1000000);
    if (gcd_of(b) == 0) continue;
    report.generic_rank = std::max(report.generic_rank, static_cast<int>(rank(combine(grams, b))));
  }
  report.generic_rank = std::max(report.generic_rank, report.min_rank_found);

  // Every member of a one-form pencil is a multiple of that form.
  if (r == 1) report.certified = true;
  if (r == 2) {
    auto disc = discriminant_binary_form(system[0], system[1]);
    if (!disc.form.is_zero()) {
      const auto roots = rational_roots(disc.form);
      for (const auto& [a1, a2] : roots) {
        if (!a1.fits_slong_p() || !a2.fits_slong_p()) continue;
        const IntVector member{a1.get_si(), a2.get_si()};
        const int rk = static_cast<int>(rank(combine(grams, member)));
        report.root_members.emplace_back(member, rk);
        if (rk < report.min_rank_found) {
          report.min_rank_found = rk;
          report.witness = member;
        }
      }
      // Off the roots every member is nonsingular.
      report.certified = report.root_members.size() == roots.size();
    }
    report.discriminant = std::move(disc);
  }
  return report;
}

std::vector<std::int64_t> bad_primes(const Form& form, std::span<const std::int64_t> primes) {
  std::vector<std::int64_t> bad;
  std::vector<Integer> coeffs;
  for (const auto& m : form.monomials()) coeffs.emplace_back(static_cast<long>(m.coefficient));
  const Integer content = coeffs.empty() ? Integer(0) : gcd_of(coeffs);
  std::optional<Integer> minor;
  if (form.degree() == 2) minor = bareiss(gram_matrix(form)).last_pivot;
  for (auto p : primes) {
    const bool divides_factorial = p <= form.degree();
    const bool divides_content = content != 0 && mpz_divisible_ui_p(content.get_mpz_t(), static_cast<unsigned long>(p));
    const bool divides_minor = minor && mpz_divisible_ui_p(minor->get_mpz_t(), static_cast<unsigned long>(p));
    if (divides_factorial || divides_content || divides_minor) bad.push_back(p);
  }
  return bad;
}

VStarEstimate vstar_dim_estimate(const Form& form, std::span<const std::int64_t> primes, const Budget& budget) {
  if (primes.empty()) throw InputError("no primes given");
  for (auto p : primes)
    if (!is_prime(p)) throw InputError(std::to_string(p) + " is not prime");
  VStarEstimate out;
  out.bad_primes = bad_primes(form, primes);
  const PolySystem gradient = PolySystem::gradient_of(form);
  std::vector<double> good;
  for (auto p : primes) {
    PrimeCount pc;
    pc.p = p;
    pc.count = count_poly_zeros_mod(gradient, p, budget).count;
    pc.log_p_count = std::log(static_cast<double>(pc.count)) / std::log(static_cast<double>(p));
    pc.bad = std::find(out.bad_primes.begin(), out.bad_primes.end(), p) != out.bad_primes.end();
    if (!pc.bad) good.push_back(pc.log_p_count);
    out.per_prime.push_back(pc);
  }
  if (good.empty()) throw InputError("every given prime is bad for this form");
  out.estimate = median(good);
  return out;
}

bool decomposition_reconstructs(const Form& cubic, std::span<const LinearQuadraticTerm> terms) {
  std::map<std::vector<int>, Rational> acc;
  for (const auto& t : terms) {
    for (std::size_t l = 0; l < t.linear.size(); ++l) {
      if (t.linear[l] == 0) continue;
      for (const auto& [i, j, c] : t.quadratic) {
        std::vector<int> key{static_cast<int>(l), i, j};
        std::sort(key.begin(), key.end());
        acc[key] += t.linear[l] * c;
      }
    }
  }
  std::map<std::vector<int>, Rational> expected;
  for (const auto& m : cubic.monomials()) expected[m.indices] = Rational(static_cast<long>(m.coefficient));
  for (auto it = acc.begin(); it != acc.end();) it = it->second == 0 ? acc.erase(it) : std::next(it);
  return acc == expected;
}

HInvariantBounds h_invariant_bounds(const Form& cubic, std::int64_t h_diag, const Budget& budget) {
  if (cubic.degree() != 3) throw InputError("h-invariant bounds need a cubic form");
  if (h_diag < 1) throw InputError("diagnostic height must be at least 1");
  const int s = cubic.num_vars();
  HInvariantBounds out;
  const auto vars = cubic.occurring_variables();
  out.upper = static_cast<int>(vars.size());

  // C = sum_j x_j * (dC/dx_j) / 3 over the occurring variables.
  for (int j : vars) {
    LinearQuadraticTerm term;
    term.linear.assign(static_cast<std::size_t>(s), Rational(0));
    term.linear[static_cast<std::size_t>(j)] = 1;
    std::map<std::pair<int, int>, Rational> q;
    for (const auto& m : cubic.monomials()) {
      const auto mult = std::count(m.indices.begin(), m.indices.end(), j);
      if (mult == 0) continue;
      std::vector<int> rest = m.indices;
      rest.erase(std::find(rest.begin(), rest.end(), j));
      q[{rest[0], rest[1]}] += Rational(static_cast<long>(m.coefficient) * mult, 3);
    }
    for (auto& [ij, c] : q) {
      c.canonicalize();
      if (c != 0) term.quadratic.emplace_back(ij.first, ij.second, c);
    }
    out.decomposition.push_back(std::move(term));
  }
  out.decomposition_verified = decomposition_reconstructs(cubic, out.decomposition);

  std::vector<std::int64_t> grid;
  for (std::int64_t H = 2; H <= h_diag; H *= 2) grid.push_back(H);
  if (grid.empty() || grid.back() != h_diag) grid.push_back(h_diag);
  const LatticeBox box = LatticeBox::unit(s);
  int lower = cubic.is_zero() ? 0 : 1;
  // C = L_1 Q_1 + ... + L_h Q_h has at least ~P^(2s-3h) bilinear zeros.
  for (auto H : grid) {
    const auto res = count_multilinear_zeros(cubic, Rational(static_cast<long>(H)), box, budget);
    const double value = 2.0 * s - std::log(static_cast<double>(res.count)) / std::log(2.0 * static_cast<double>(H) + 1);
    out.diagnostics.emplace_back(H, res.count, value);
    lower = std::max(lower, static_cast<int>(std::ceil(value / 3 - 1e-9)));
  }
  // ... and a singular locus of dimension at least s - 2h.
  if (!cubic.is_zero()) {
    const std::int64_t primes[] = {5, 7, 11, 13};
    try {
      const auto est = vstar_dim_estimate(cubic, primes, budget);
      out.singular_dim = est.estimate;
      lower = std::max(lower, static_cast<int>(std::ceil((s - std::round(est.estimate)) / 2 - 1e-9)));
    } catch (const FeasibilityError&) {
    } catch (const InputError&) {
    }
  }
  out.lower = std::clamp(lower, 0, out.upper);
  return out;
}

Integer phi_of_degree(int d, bool* is_bound) {
  if (d < 2) throw InputError("degree must be at least 2");
  if (is_bound) *is_bound = d >= 6;
  switch (d) {
    case 2:
    case 3:
      return 1;
    case 4:
      return 3;
    case 5:
      return 13;
    default:
      break;
  }
  if (d > 40) throw InputError("phi(d) table stops at d = 40");
  long double v = 1;
  for (int k = 2; k <= d; ++k) v *= k;
  v /= std::pow(std::log(2.0L), static_cast<long double>(d));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0Lf", std::ceil(v));
  return Integer(buf, 10);
}

DichotomyConstants dichotomy_constants(int s, int r, int d, const Rational& max_vstar_dim,
                                       std::optional<int> pencil_invariant) {
  if (s < 1 || r < 1 || d < 2) throw InputError("need s >= 1, r >= 1, d >= 2");
  if (max_vstar_dim < 0 || max_vstar_dim > s) throw InputError("dim V_a* must lie in [0, s]");
  DichotomyConstants c;
  c.s = s;
  c.r = r;
  c.d = d;
  c.max_vstar_dim = max_vstar_dim;
  c.K = (Rational(s) - max_vstar_dim) / Rational(Integer(1) << (d - 1));
  c.K.canonicalize();
  c.phi_d = phi_of_degree(d, &c.phi_is_bound);
  const Integer base = Integer(d - 1) * (Integer(1) << (d - 1)) * r * (r + 1);
  c.m = c.phi_d * base + 1;
  c.delta_cap = (d - 1) * r;
  c.dimension_hypothesis = Rational(s) - max_vstar_dim > Rational(base);
  c.pencil_invariant = pencil_invariant;
  if (pencil_invariant) c.invariant_hypothesis = Integer(*pencil_invariant) >= c.m;
  return c;
}

DichotomyConstants dichotomy_constants(const FormSystem& system, const PencilRankReport& report) {
  if (system.degree() != 2) throw InputError("a pencil rank report only describes quadratic systems");
  return dichotomy_constants(system.num_vars(), system.num_forms(), 2,
                             Rational(system.num_vars() - report.min_rank_found), report.min_rank_found);
}

GrowthFit fit_M_exponent(const FormSystem& system, const PencilVector& a, std::span<const std::int64_t> heights,
                         const LatticeBox& box, const Budget& budget) {
  if (heights.size() < 2) throw InputError("need at least two heights");
  GrowthFit fit;
  std::vector<double> xs, ys;
  for (auto H : heights) {
    const auto res = count_M(system, a, Rational(static_cast<long>(H)), box, budget);
    fit.counts.emplace_back(H, res.count);
    xs.push_back(std::log(2.0 * static_cast<double>(H) + 1));
    ys.push_back(std::log(static_cast<double>(res.count)));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  return fit;
}

}  // namespace weylsys
