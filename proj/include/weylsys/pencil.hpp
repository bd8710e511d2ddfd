#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "weylsys/arith.hpp"
#include "weylsys/budget.hpp"
#include "weylsys/form.hpp"
#include "weylsys/linalg.hpp"

namespace weylsys {

/// 2A for a quadratic form F(x) = x^T A x; always integral.
IntMatrix gram_matrix(const Form& form);

/// Exact rank of the Gram matrix.
std::size_t rank_quadratic(const Form& form);

/// Homogeneous integer polynomial in (a1, a2); coeffs[k] multiplies
/// a1^(n-k) a2^k where n = coeffs.size() - 1.
struct BinaryForm {
  std::vector<Integer> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const;
  Integer eval(const Integer& a1, const Integer& a2) const;
  std::string to_string() const;
};

struct DiscriminantResult {
  /// det(a1 G1 + a2 G2) with G = 2A.
  BinaryForm form;
  /// det(a1 A1 + a2 A2) = form / scaling, scaling = 2^s.
  Integer scaling;
};

DiscriminantResult discriminant_binary_form(const Form& f1, const Form& f2);

/// Projective rational zeros of a nonzero binary form as primitive integer
/// pairs (first nonzero entry positive), sorted. Each is verified exactly.
std::vector<std::pair<Integer, Integer>> rational_roots(const BinaryForm& form);

struct PencilRankReport {
  int generic_rank = 0;
  int min_rank_found = 0;
  IntVector witness;
  int search_height = 0;
  bool certified = false;
  std::uint64_t members_checked = 0;
  /// For r = 2: the rational roots of the discriminant form and the pencil
  /// ranks there.
  std::optional<DiscriminantResult> discriminant;
  std::vector<std::pair<IntVector, int>> root_members;
};

/// Minimum rank over primitive pencil vectors of height <= `height`.
PencilRankReport min_pencil_rank_search(const FormSystem& system, int height, std::uint64_t seed = 0,
                                        const Budget& budget = {});

struct PrimeCount {
  std::int64_t p = 0;
  u128 count = 0;
  double log_p_count = 0.0;
  bool bad = false;
};

struct VStarEstimate {
  double estimate = 0.0;
  std::vector<PrimeCount> per_prime;
  std::vector<std::int64_t> bad_primes;
};

/// Median over good primes of log_p #{x mod p : grad F(x) = 0 mod p}.
VStarEstimate vstar_dim_estimate(const Form& form, std::span<const std::int64_t> primes, const Budget& budget = {});

/// Primes at which reduction may change the gradient locus: p | d!, and for
/// quadratics p | the largest nonvanishing pivot minor of the Gram matrix.
std::vector<std::int64_t> bad_primes(const Form& form, std::span<const std::int64_t> primes);

struct LinearQuadraticTerm {
  RationalVector linear;
  /// (i, j, coefficient) with i <= j, the quadratic coefficient of x_i x_j.
  std::vector<std::tuple<int, int, Rational>> quadratic;
};

struct HInvariantBounds {
  int lower = 0;
  int upper = 0;
  bool lower_is_heuristic = true;
  std::vector<LinearQuadraticTerm> decomposition;
  bool decomposition_verified = false;
  /// Estimated dimension of the singular locus (median over good primes).
  std::optional<double> singular_dim;
  /// (H, bilinear zero count, 2s - log count / log(2H+1)).
  std::vector<std::tuple<std::int64_t, u128, double>> diagnostics;
};

HInvariantBounds h_invariant_bounds(const Form& cubic, std::int64_t h_diag, const Budget& budget = {});

/// Expands sum L_i Q_i back into monomials and compares with the cubic.
bool decomposition_reconstructs(const Form& cubic, std::span<const LinearQuadraticTerm> terms);

struct DichotomyConstants {
  int s = 0, r = 0, d = 0;
  Rational max_vstar_dim;
  Rational K;
  Integer phi_d;
  bool phi_is_bound = false;
  /// Delta ranges over (0, delta_cap * theta].
  int delta_cap = 0;
  Integer m;
  /// s - max dim V_a* > r(r+1)(d-1)2^(d-1).
  bool dimension_hypothesis = false;
  /// Minimum pencil rank (d = 2) or an h-invariant lower bound (d >= 3).
  std::optional<int> pencil_invariant;
  /// pencil_invariant >= m, when known.
  std::optional<bool> invariant_hypothesis;
};

Integer phi_of_degree(int d, bool* is_bound = nullptr);

DichotomyConstants dichotomy_constants(int s, int r, int d, const Rational& max_vstar_dim,
                                       std::optional<int> pencil_invariant = std::nullopt);
DichotomyConstants dichotomy_constants(const FormSystem& system, const PencilRankReport& report);

/// Least-squares slope of log M(a; H) against log(2H+1).
struct GrowthFit {
  double slope = 0.0;
  std::vector<std::pair<std::int64_t, u128>> counts;
};

GrowthFit fit_M_exponent(const FormSystem& system, const PencilVector& a, std::span<const std::int64_t> heights,
                         const LatticeBox& box, const Budget& budget = {});

}  // namespace weylsys
