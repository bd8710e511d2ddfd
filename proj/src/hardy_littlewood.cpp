#include "weylsys/hardy_littlewood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/parallel.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/factor.hpp"
#include "weylsys/poly_system.hpp"
#include "weylsys/rng.hpp"

namespace weylsys {
namespace {

Rational prime_power(std::int64_t p, long e) {
  Integer v;
  mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::labs(e)));
  return e >= 0 ? Rational(v) : Rational(Integer(1), v);
}

bool close(const Rational& a, const Rational& b) {
  if (a == b) return true;
  const double x = a.get_d(), y = b.get_d();
  return std::fabs(x - y) <= 1e-3 * std::max(std::fabs(x), std::fabs(y));
}

struct CompiledForm {
  std::vector<double> coeffs;
  std::vector<int> indices;  // degree per monomial
  int degree = 0;

  double eval(const std::vector<double>& x) const {
    double total = 0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      double term = coeffs[m];
      for (int k = 0; k < degree; ++k) term *= x[static_cast<std::size_t>(indices[m * static_cast<std::size_t>(degree) + static_cast<std::size_t>(k)])];
      total += term;
    }
    return total;
  }
};

}  // namespace

SingularSeriesEstimate singular_series(const FormSystem& system, std::int64_t p_max, int k_max, const Budget& budget) {
  if (p_max < 2) throw InputError("p_max must be at least 2");
  if (k_max < 1) throw InputError("k_max must be at least 1");
  const long s = system.num_vars();
  const long r = system.num_forms();
  const long d = system.degree();
  const PolySystem sys = PolySystem::from_forms(system);
  SingularSeriesEstimate out;
  out.p_max = p_max;
  out.k_max = k_max;
  for (std::int64_t p = 2; p <= p_max; ++p) {
    if (!is_prime(p)) continue;
    LocalFactor f;
    f.p = p;
    std::int64_t modulus = 1;
    for (int k = 1; k <= k_max; ++k) {
      if (modulus > (std::int64_t{1} << 31) / p) {
        f.truncated = true;
        break;
      }
      modulus *= p;
      if (count_mod_cost(sys, modulus) > budget.ceiling) {
        f.truncated = true;
        break;
      }
      const u128 count = count_poly_zeros_mod(sys, modulus, budget).count;
      f.counts.push_back(count);
      f.chi.push_back(Rational(to_integer(count)) * prime_power(p, -k * (s - r)));
      // Solutions with every coordinate divisible by p.
      const Integer nonprimitive =
          k <= d ? prime_power(p, s * (k - 1)).get_num()
                 : prime_power(p, s * (d - 1)).get_num() * to_integer(f.counts[static_cast<std::size_t>(k - d - 1)]);
      if (to_integer(count) == nonprimitive && s > r * d) {
        f.obstructed = true;
        break;
      }
    }
    if (f.counts.empty()) {
      out.skipped_primes.push_back(p);
      continue;
    }
    const std::size_t n = f.chi.size();
    f.stabilized = n >= 2 && close(f.chi[n - 1], f.chi[n - 2]);
    f.value = f.obstructed ? 0.0 : f.chi.back().get_d();
    if (f.obstructed) out.obstructed_primes.push_back(p);
    if (!f.stabilized && !f.obstructed) out.unstable_primes.push_back(p);
    out.product *= f.value;
    out.factors.push_back(std::move(f));
  }
  return out;
}

SingularIntegralEstimate singular_integral(const FormSystem& system, const LatticeBox& box,
                                           const std::vector<double>& epsilons, std::uint64_t samples,
                                           std::uint64_t seed, const Budget& budget) {
  if (samples < 10000) throw InputError("at least 10^4 samples are required");
  if (epsilons.empty()) throw InputError("need at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0)) throw InputError("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InputError("epsilons must be strictly decreasing");
  }
  if (box.dim() != system.num_vars()) throw InputError("box dimension does not match variable count");
  const int s = system.num_vars();
  const int r = system.num_forms();

  std::vector<CompiledForm> forms;
  double terms = 0;
  for (const auto& f : system.forms()) {
    CompiledForm c;
    c.degree = f.degree();
    for (const auto& m : f.monomials()) {
      c.coeffs.push_back(static_cast<double>(m.coefficient));
      c.indices.insert(c.indices.end(), m.indices.begin(), m.indices.end());
    }
    terms += static_cast<double>(c.coeffs.size());
    forms.push_back(std::move(c));
  }
  budget.require(static_cast<double>(samples) * (terms + s), "singular integral sampling");

  std::vector<double> lo, width;
  for (const auto& [l, u] : box.intervals()) {
    lo.push_back(l.get_d());
    width.push_back(Rational(u - l).get_d());
  }
  const double volume = box.volume().get_d();
  const CounterRng rng(seed);
  const std::size_t chunks = 64;
  const auto partial = detail::run_partitioned<std::vector<std::uint64_t>>(chunks, budget.workers, [&](std::size_t c) {
    std::vector<std::uint64_t> hits(epsilons.size(), 0);
    std::vector<double> x(static_cast<std::size_t>(s));
    const std::uint64_t begin = samples * c / chunks;
    const std::uint64_t end = samples * (c + 1) / chunks;
    for (std::uint64_t n = begin; n < end; ++n) {
      for (int j = 0; j < s; ++j)
        x[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)] + width[static_cast<std::size_t>(j)] * rng.uniform(static_cast<std::uint64_t>(j), n);
      double worst = 0;
      for (const auto& f : forms) worst = std::max(worst, std::fabs(f.eval(x)));
      for (std::size_t e = 0; e < epsilons.size() && worst <= epsilons[e]; ++e) ++hits[e];
    }
    return hits;
  });

  SingularIntegralEstimate out;
  out.epsilons = epsilons;
  out.samples = samples;
  out.seed = seed;
  out.hits.assign(epsilons.size(), 0);
  for (const auto& h : partial)
    for (std::size_t e = 0; e < h.size(); ++e) out.hits[e] += h[e];
  const double N = static_cast<double>(samples);
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const double norm = volume / std::pow(2 * epsilons[e], r);
    const double frac = static_cast<double>(out.hits[e]) / N;
    out.estimates.push_back(norm * frac);
    // With no hits, the rule-of-three scale stands in for sigma.
    out.sigmas.push_back(out.hits[e] ? norm * std::sqrt(frac * (1 - frac) / N) : norm / N);
  }
  const std::size_t last = epsilons.size() - 1;
  out.extrapolated = out.estimates[last];
  out.band = 3 * out.sigmas[last];
  if (last > 0) {
    const double step = std::fabs(out.estimates[last] - out.estimates[last - 1]);
    out.band = std::max(out.band, step);
    out.converged = out.estimates[last] > 0 && step <= std::max(3 * out.sigmas[last], 0.05 * out.estimates[last]);
  }
  return out;
}

AsymptoticReport asymptotic_report(const FormSystem& system, const LatticeBox& box, std::vector<Rational> P_list,
                                   std::int64_t p_max, int k_max, const MonteCarloParams& mc, double tolerance,
                                   const Budget& budget) {
  if (P_list.empty()) throw InputError("need at least one P");
  for (auto& P : P_list) {
    P.canonicalize();
    if (P <= 0) throw InputError("P values must be positive");
  }
  std::sort(P_list.begin(), P_list.end());
  P_list.erase(std::unique(P_list.begin(), P_list.end()), P_list.end());

  AsymptoticReport rep;
  rep.tolerance = tolerance;
  rep.series = singular_series(system, p_max, k_max, budget);
  rep.integral = singular_integral(system, box, mc.epsilons, mc.samples, mc.seed, budget);
  const double predicted = rep.integral.extrapolated * rep.series.product;
  const int exponent = system.num_vars() - system.num_forms() * system.degree();
  for (const auto& P : P_list) {
    AsymptoticRow row;
    row.P = P;
    row.rho = count_zeros(system, box, P, budget).count;
    row.main_power = std::pow(P.get_d(), exponent);
    row.ratio = static_cast<double>(row.rho) / row.main_power;
    row.predicted = predicted;
    row.relative_deviation = predicted != 0 ? (row.ratio - predicted) / predicted : row.ratio;
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      rep.monotone = rep.monotone && std::fabs(rep.rows[i].relative_deviation) < std::fabs(rep.rows[i - 1].relative_deviation);
    std::vector<double> xs, ys;
    for (const auto& row : rep.rows) {
      if (row.relative_deviation == 0) continue;
      xs.push_back(std::log(row.P.get_d()));
      ys.push_back(std::log(std::fabs(row.relative_deviation)));
    }
    if (xs.size() >= 2) {
      const double n = static_cast<double>(xs.size());
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      if (sxx > 0) rep.empirical_delta = -sxy / sxx;
    }
  }
  if (rep.rows.size() < 2) {
    rep.verdict = "insufficient data";
  } else if (rep.series.product == 0) {
    rep.verdict = "obstructed";
  } else if (rep.monotone && std::fabs(rep.rows.back().relative_deviation) < tolerance) {
    rep.verdict = "consistent";
  } else {
    rep.verdict = "inconsistent";
  }
  return rep;
}

}  // namespace weylsys
