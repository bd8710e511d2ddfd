#include "weylsys/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "detail/parallel.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/linalg.hpp"
#include "weylsys/pencil.hpp"
#include "weylsys/poly_system.hpp"

namespace weylsys {
namespace {

// Fixed so that sums do not depend on the worker count.
constexpr std::size_t kPartitions = 16;

/// Neumaier-compensated sum of complex terms.
struct CompensatedSum {
  long double re = 0, im = 0, re_c = 0, im_c = 0;

  static void add(long double& sum, long double& comp, long double v) {
    const long double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  void add(long double x, long double y) {
    add(re, re_c, x);
    add(im, im_c, y);
  }
  void add(const CompensatedSum& o) {
    add(o.re + o.re_c, o.im + o.im_c);
  }
  std::complex<long double> value() const { return {re + re_c, im + im_c}; }
};

struct ExactWeights {
  Form combined;
  std::int64_t modulus;
};

std::optional<ExactWeights> exact_weights(const FormSystem& system, const Alpha& alpha) {
  if (!alpha.exact()) return std::nullopt;
  Integer L = 1;
  for (const auto& q : *alpha.exact()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den().get_mpz_t());
  if (L > Integer("4611686018427387904")) return std::nullopt;
  IntVector w;
  for (const auto& q : *alpha.exact()) {
    // Only the residue of the weight modulo L matters.
    Integer wi = q.get_num() * (L / q.get_den());
    mpz_fdiv_r(wi.get_mpz_t(), wi.get_mpz_t(), L.get_mpz_t());
    w.push_back(wi.get_si());
  }
  try {
    return ExactWeights{pencil_combine(system, w), L.get_si()};
  } catch (const InputError&) {
    return std::nullopt;
  }
}

Integer round_rational(const Rational& x) { return floor_rational(x + Rational(1, 2)); }

double power(double base, double exponent) { return std::pow(base, exponent); }

/// Pencil vectors a with sum a_i F_i identically zero. Such an a annihilates
/// every Psi row, collected or not.
std::vector<std::vector<Integer>> identical_relations(const FormSystem& system) {
  const std::size_t r = static_cast<std::size_t>(system.num_forms());
  std::map<std::vector<int>, std::vector<Integer>> by_monomial;
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& m : system[i].monomials()) {
      auto& row = by_monomial.try_emplace(m.indices, r, Integer(0)).first->second;
      row[i] += static_cast<long>(m.coefficient);
    }
  IncrementalRowSpace space(r);
  for (const auto& [key, row] : by_monomial) space.insert(row);
  if (space.rank() == r) return {};
  return space.kernel();
}

}  // namespace

WeylSumResult weyl_sum(const FormSystem& system, const Alpha& alpha, const LatticeBox& box, const Rational& scale,
                       const Budget& budget) {
  if (static_cast<int>(alpha.size()) != system.num_forms()) throw InputError("alpha length does not match r");
  if (box.dim() != system.num_vars()) throw InputError("box dimension does not match variable count");
  const auto ranges = box.scaled_ranges(scale);
  const auto exact = exact_weights(system, alpha);
  const PolySystem sys = exact ? PolySystem::from_form(exact->combined) : PolySystem::from_forms(system);
  const auto blocks = sys.variable_blocks();

  WeylSumResult result;
  result.exact_phases = exact.has_value();
  result.method = blocks.size() > 1 ? "block-product" : "direct";
  result.num_points = 1;
  double cost = 0;
  for (const auto& b : blocks) {
    std::vector<IntRange> local;
    for (int v : b) local.push_back(ranges[static_cast<std::size_t>(v)]);
    cost += LatticePoints(local).count_estimate() * sys.size();
  }
  budget.require(cost, "Weyl sum");

  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  std::complex<long double> total = 1;
  for (const auto& b : blocks) {
    std::vector<IntRange> local;
    for (int v : b) local.push_back(ranges[static_cast<std::size_t>(v)]);
    const PolySystem part = sys.restrict_to(b);
    require_int128_range(part, local);
    const LatticePoints points(local);
    result.num_points *= to_integer(static_cast<u128>(points.count()));
    const auto parts = points.partition(kPartitions);
    result.partitions = std::max(result.partitions, parts.size());
    const auto sums = detail::run_partitioned<CompensatedSum>(parts.size(), budget.workers, [&](std::size_t p) {
      CompensatedSum acc;
      for (const auto& x : parts[p]) {
        long double frac;
        if (exact) {
          // Fold m onto [0, L/2] so that S(-alpha) is bitwise the conjugate.
          const std::int64_t m = mod_floor(part.eval(0, x), exact->modulus);
          const bool upper = 2 * static_cast<i128>(m) > exact->modulus;
          const long double t = two_pi * static_cast<long double>(upper ? exact->modulus - m : m) /
                                static_cast<long double>(exact->modulus);
          const long double sine = 2 * static_cast<i128>(m) == exact->modulus ? 0.0L : std::sin(t);
          acc.add(std::cos(t), upper ? -sine : sine);
          continue;
        } else {
          long double phase = 0;
          for (int i = 0; i < part.size(); ++i) {
            const long double term = static_cast<long double>(alpha.approx()[static_cast<std::size_t>(i)]) *
                                     static_cast<long double>(part.eval(i, x));
            phase += term - std::floor(term);
          }
          frac = phase - std::floor(phase);
        }
        acc.add(std::cos(two_pi * frac), std::sin(two_pi * frac));
      }
      return acc;
    });
    CompensatedSum block_sum;
    for (const auto& s : sums) block_sum.add(s);
    total *= block_sum.value();
  }
  result.value = {static_cast<double>(total.real()), static_cast<double>(total.imag())};
  const double n = result.num_points.get_d();
  result.normalized_modulus = n > 0 ? std::abs(result.value) / n : 0.0;
  return result;
}

std::optional<RationalApprox> rational_approx_search(const Alpha& alpha, std::int64_t q_max, double window) {
  if (q_max < 1) throw InputError("q_max must be at least 1");
  if (!(window >= 0)) throw InputError("approximation window must be nonnegative");
  const std::size_t r = alpha.size();
  const Rational exact_window = rational_from_double(window);
  for (std::int64_t q = 1; q <= q_max; ++q) {
    RationalApprox hit;
    hit.q = q;
    hit.a.resize(r);
    bool ok = true;
    if (alpha.exact()) {
      Rational worst = 0;
      for (std::size_t i = 0; i < r && ok; ++i) {
        const Rational qa = (*alpha.exact())[i] * Rational(static_cast<long>(q));
        const Integer a = round_rational(qa);
        const Rational err = abs(qa - Rational(a));
        ok = err <= exact_window && a.fits_slong_p();
        worst = std::max(worst, err);
        if (ok) hit.a[i] = a.get_si();
      }
      hit.max_error = worst.get_d();
    } else {
      long double worst = 0;
      for (std::size_t i = 0; i < r && ok; ++i) {
        const long double qa = static_cast<long double>(alpha.approx()[i]) * static_cast<long double>(q);
        const long double a = std::nearbyint(qa);
        const long double err = std::fabs(qa - a);
        ok = err <= window;
        worst = std::max(worst, err);
        hit.a[i] = static_cast<std::int64_t>(a);
      }
      hit.max_error = static_cast<double>(worst);
    }
    if (!ok) continue;
    IntVector all = hit.a;
    all.push_back(q);
    const std::int64_t g = gcd_of(all);
    if (g > 1) {
      hit.q /= g;
      for (auto& a : hit.a) a /= g;
      hit.max_error /= static_cast<double>(g);
    }
    return hit;
  }
  return std::nullopt;
}

DichotomyReport dichotomy_experiment(const FormSystem& system, const Alpha& alpha, const Rational& theta,
                                     const Rational& scale, const LatticeBox& box, const DichotomyOptions& options,
                                     const Budget& budget) {
  if (theta <= 0 || theta > 1) throw InputError("theta must lie in (0, 1]");
  if (scale < 1) throw InputError("P must be at least 1");
  const int s = system.num_vars();
  const int r = system.num_forms();
  const int d = system.degree();
  const double P = scale.get_d();
  const double th = theta.get_d();
  const auto& cal = options.calibration;

  DichotomyReport rep;
  rep.alpha = alpha.to_strings();
  rep.theta = theta;
  rep.P = scale;
  rep.epsilon = options.epsilon;

  // (1) the exponential sum and the k it implies.
  rep.weyl = weyl_sum(system, alpha, box, scale, budget);
  const double modulus = std::abs(rep.weyl.value);
  if (modulus > 0 && P > 1) rep.k_measured = s - std::log(modulus) / std::log(P);

  if (options.k) {
    rep.k = *options.k;
    rep.k_source = "given";
  } else if (d == 2) {
    const auto ranks = min_pencil_rank_search(system, options.pencil_height, 0, budget);
    rep.k = ranks.min_rank_found / 2.0 * th - options.epsilon;
    rep.k_source = "pencil-rank";
  } else {
    rep.k = rep.k_measured.value_or(0.0);
    rep.k_source = "measured";
  }
  rep.bound_i = cal.C1 * power(P, s - rep.k);
  rep.holds_i = modulus <= rep.bound_i;

  // (2) the tuples counted by N(P^theta; P^(-d+(d-1)theta); alpha) and their Psi rows.
  double p_theta = power(P, th);
  if (std::fabs(p_theta - std::nearbyint(p_theta)) < 1e-9) p_theta = std::nearbyint(p_theta);
  rep.P_theta = p_theta;
  rep.Q = power(P, -d + (d - 1) * th);
  CountWindow window;
  window.scale = rational_from_double(p_theta);
  window.Q = rep.Q;
  window.theta = th;
  IncrementalRowSpace rows(static_cast<std::size_t>(r));
  std::vector<Integer> row_buffer(static_cast<std::size_t>(r));
  const auto n = count_N(system, alpha, box, window, budget, options.guard_band, [&](std::span<const i128> row) {
    ++rep.rows_collected;
    if (rows.rank() < static_cast<std::size_t>(r)) {
      for (std::size_t i = 0; i < row.size(); ++i) row_buffer[i] = to_integer(row[i]);
      rows.insert(row_buffer);
    }
    return rep.rows_collected < options.row_cap;
  });
  rep.n_count = n.count;
  rep.near_threshold = n.near_threshold;
  rep.psi_matrix_rank = rows.rank();

  rep.q_window = cal.C2 * power(P, r * (d - 1) * th);
  rep.approx_window = cal.C2 * power(P, -d + r * (d - 1) * th);

  // (3) Case I: q = det R and R a = q b.
  if (rows.rank() == static_cast<std::size_t>(r)) {
    rep.psi_case = "I";
    const auto& R = rows.independent_rows();
    IntMatrix Rm(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
    RationalMatrix Rq(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        Rm(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        Rq(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Rational(R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
    Integer q = determinant(Rm);
    RationalVector b(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      if (alpha.exact()) {
        Rational v = 0;
        for (int j = 0; j < r; ++j) v += Rq(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * (*alpha.exact())[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(i)] = Rational(round_rational(v));
      } else {
        long double v = 0;
        for (int j = 0; j < r; ++j)
          v += static_cast<long double>(R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get_d()) *
               static_cast<long double>(alpha.approx()[static_cast<std::size_t>(j)]);
        b[static_cast<std::size_t>(i)] = Rational(static_cast<long>(std::llround(v)));
      }
    }
    const RationalVector x = solve(Rq, b);
    std::vector<Integer> a;
    for (const auto& xi : x) {
      Rational v = xi * Rational(q);
      v.canonicalize();
      if (v.get_den() != 1) throw std::logic_error("Cramer solution is not integral");
      a.push_back(v.get_num());
    }
    if (q < 0) {
      q = -q;
      for (auto& ai : a) ai = -ai;
    }
    std::vector<Integer> all = a;
    all.push_back(q);
    const Integer g = gcd_of(all);
    q /= g;
    for (auto& ai : a) ai /= g;
    DichotomyCertificate cert{q, a, 0.0, std::nullopt};
    if (alpha.exact()) {
      Rational worst = 0;
      for (int i = 0; i < r; ++i)
        worst = std::max(worst, Rational(abs(Rational(q) * (*alpha.exact())[static_cast<std::size_t>(i)] - Rational(a[static_cast<std::size_t>(i)]))));
      cert.exact_error = worst;
      cert.max_error = worst.get_d();
    } else {
      long double worst = 0;
      for (int i = 0; i < r; ++i)
        worst = std::max(worst, std::fabs(static_cast<long double>(q.get_d()) * alpha.approx()[static_cast<std::size_t>(i)] -
                                          static_cast<long double>(a[static_cast<std::size_t>(i)].get_d())));
      cert.max_error = static_cast<double>(worst);
    }
    rep.certificate = std::move(cert);
  } else if (const auto relations = identical_relations(system); rows.rank() > 0 || !relations.empty()) {
    // Case II: the columns of Psi are dependent.
    rep.psi_case = "II";
    const auto kernel = relations.empty() ? rows.kernel() : relations;
    IntVector a;
    for (const auto& v : kernel.front()) a.push_back(to_int64(v));
    const PencilVector pv(a);
    rep.kernel_vector = pv.values();
    rep.kernel_bound = cal.C3 * power(p_theta, (d - 1) * s - std::ldexp(1.0, d - 1) * rep.k / th - options.epsilon);
    try {
      rep.kernel_count_M = count_M(system, pv, window.scale, box, budget).count;
      rep.holds_iii = static_cast<double>(*rep.kernel_count_M) >= rep.kernel_bound;
    } catch (const FeasibilityError&) {
      rep.kernel_count_M.reset();
    }
  } else {
    rep.psi_case = "inconclusive";
  }

  // Cross-check (ii) with a direct scan over q.
  if (rep.q_window >= 1 && rep.q_window <= 1e8) {
    rep.search_certificate = rational_approx_search(alpha, static_cast<std::int64_t>(std::floor(rep.q_window)), rep.approx_window);
  }
  bool cert_ok = false;
  if (rep.certificate) {
    cert_ok = rep.certificate->q.get_d() <= rep.q_window && rep.certificate->max_error <= rep.approx_window;
    if (rep.search_certificate) {
      bool same = rep.certificate->q == rep.search_certificate->q;
      for (int i = 0; i < r && same; ++i)
        same = rep.certificate->a[static_cast<std::size_t>(i)] == rep.search_certificate->a[static_cast<std::size_t>(i)];
      rep.certificates_agree = same;
    } else {
      rep.certificates_agree = false;
    }
  }
  rep.holds_ii = cert_ok || rep.search_certificate.has_value();
  return rep;
}

}  // namespace weylsys
