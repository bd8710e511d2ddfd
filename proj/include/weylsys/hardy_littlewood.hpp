#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weylsys/arith.hpp"
#include "weylsys/budget.hpp"
#include "weylsys/form.hpp"

namespace weylsys {

struct LocalFactor {
  std::int64_t p = 0;
  /// counts[k-1] = #{x mod p^k : F(x) = 0 mod p^k}.
  std::vector<u128> counts;
  /// chi[k-1] = p^(-k(s-r)) counts[k-1], exactly.
  std::vector<Rational> chi;
  /// Last two chi within relative 1e-3.
  bool stabilized = false;
  /// No nonsingular-free solution survives: chi_p = 0 exactly.
  bool obstructed = false;
  /// k stopped below k_max because p^k counting was too expensive.
  bool truncated = false;
  /// The value entering the product.
  double value = 1.0;
};

struct SingularSeriesEstimate {
  std::vector<LocalFactor> factors;
  double product = 1.0;
  std::vector<std::int64_t> unstable_primes;
  std::vector<std::int64_t> obstructed_primes;
  std::vector<std::int64_t> skipped_primes;
  std::int64_t p_max = 0;
  int k_max = 0;
};

SingularSeriesEstimate singular_series(const FormSystem& system, std::int64_t p_max = 50, int k_max = 3,
                                       const Budget& budget = {});

struct SingularIntegralEstimate {
  std::vector<double> epsilons;
  std::vector<double> estimates;
  std::vector<double> sigmas;
  std::vector<std::uint64_t> hits;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double extrapolated = 0.0;
  double band = 0.0;
  /// Last two estimates agree to within max(3 sigma, 5%).
  bool converged = false;
};

SingularIntegralEstimate singular_integral(const FormSystem& system, const LatticeBox& box,
                                           const std::vector<double>& epsilons, std::uint64_t samples,
                                           std::uint64_t seed, const Budget& budget = {});

struct MonteCarloParams {
  std::vector<double> epsilons{0.04, 0.02, 0.01};
  std::uint64_t samples = 2'000'000;
  std::uint64_t seed = 1;
};

struct AsymptoticRow {
  Rational P;
  u128 rho = 0;
  double main_power = 0.0;  ///< P^(s-rd)
  double ratio = 0.0;
  double predicted = 0.0;   ///< J * S
  double relative_deviation = 0.0;
};

struct AsymptoticReport {
  std::vector<AsymptoticRow> rows;
  SingularSeriesEstimate series;
  SingularIntegralEstimate integral;
  double tolerance = 0.15;
  bool monotone = false;
  /// Fitted decay exponent of |rho - J S P^(s-rd)| relative to P^(s-rd).
  std::optional<double> empirical_delta;
  /// "consistent", "inconsistent", "insufficient data" or "obstructed".
  std::string verdict;
};

AsymptoticReport asymptotic_report(const FormSystem& system, const LatticeBox& box, std::vector<Rational> P_list,
                                   std::int64_t p_max, int k_max, const MonteCarloParams& mc,
                                   double tolerance = 0.15, const Budget& budget = {});

}  // namespace weylsys
