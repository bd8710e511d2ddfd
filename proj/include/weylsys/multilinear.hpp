#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylsys/arith.hpp"
#include "weylsys/budget.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/form.hpp"

namespace weylsys {

/// A real weight vector alpha, optionally known exactly as rationals.
/// Exact alphas take exact code paths (phases, fractional parts).
class Alpha {
 public:
  explicit Alpha(std::vector<double> values);
  explicit Alpha(RationalVector exact);

  /// Each entry: a rational like "3/7" or "0.25" (exact) or any other
  /// floating literal such as "1e-3" or "0.6180339887498949" (still exact as a
  /// decimal). Entries prefixed with "~" are taken as floating point.
  static Alpha parse(const std::vector<std::string>& entries);

  std::size_t size() const noexcept { return approx_.size(); }
  const std::vector<double>& approx() const noexcept { return approx_; }
  const std::optional<RationalVector>& exact() const noexcept { return exact_; }
  bool is_exact() const noexcept { return exact_.has_value(); }

  Alpha negated() const;
  Alpha shifted(std::size_t i, std::int64_t by) const;
  bool is_zero() const;

  std::vector<std::string> to_strings() const;

 private:
  std::vector<double> approx_;
  std::optional<RationalVector> exact_;
};

/// Compiled Psi_j tensor of one form: d! * c_{j, j1..j_{d-1}} over ordered tuples.
class PsiTensor {
 public:
  explicit PsiTensor(const Form& form);

  int num_vars() const noexcept { return num_vars_; }
  int arity() const noexcept { return arity_; }

  /// tuple holds d-1 vectors of length s, concatenated.
  i128 eval(int j, std::span<const std::int64_t> tuple) const;

  /// max |Psi_j| over tuples with every coordinate in [-bound, bound].
  double magnitude_bound(double bound) const;

 private:
  int num_vars_ = 0;
  int arity_ = 0;
  std::vector<std::size_t> offsets_;  // per j into values_
  std::vector<std::int64_t> values_;
  std::vector<int> indices_;  // arity_ per value
};

Integer psi(const Form& form, int j, std::span<const IntVector> tuple);

/// sum_i w_i Psi_j^(i) for integer, rational and real weights.
Integer phi(const FormSystem& system, std::span<const std::int64_t> weights, int j,
            std::span<const IntVector> tuple);
Rational phi(const FormSystem& system, std::span<const Rational> weights, int j,
             std::span<const IntVector> tuple);
double phi(const FormSystem& system, std::span<const double> weights, int j, std::span<const IntVector> tuple);

struct CountWindow {
  Rational scale = 1;  ///< P
  double Q = 1.0;      ///< fractional-part threshold, 0 < Q <= 1
  double theta = 1.0;  ///< 0 < theta <= 1
  Rational H = 1;      ///< side scale for M, H >= 1

  void validate() const;
};

struct NCountResult {
  /// Exact: with Q near 1 every tuple counts, and there can be 11^40 of them.
  Integer count;
  /// Tuples whose distance to the threshold was within the guard band.
  std::uint64_t near_threshold = 0;
  double guard_band = 1e-9;
  bool exact_phases = false;
  std::string method;
  double cost = 0.0;
};

/// Receives each counted tuple's rows (Psi_j^(1..r)) for every j; return
/// false to stop receiving rows (counting continues).
using PsiRowSink = std::function<bool(std::span<const i128> row)>;

/// N(P; Q; alpha): (d-1)-tuples in (P*B)^(d-1) with ||Phi_j(alpha; .)|| < Q for all j.
NCountResult count_N(const FormSystem& system, const Alpha& alpha, const LatticeBox& box,
                     const CountWindow& window, const Budget& budget = {}, double guard_band = 1e-9,
                     const PsiRowSink& rows = {}, CountStrategy strategy = CountStrategy::automatic);

/// M(a; H): (d-1)-tuples in (H*B)^(d-1) with Phi_j(a; .) = 0 for all j.
CountResult count_M(const FormSystem& system, const PencilVector& a, const Rational& H, const LatticeBox& box,
                    const Budget& budget = {}, CountStrategy strategy = CountStrategy::automatic);

/// Bilinear/multilinear zero count of a single form: M((1); H) for {F}.
CountResult count_multilinear_zeros(const Form& form, const Rational& H, const LatticeBox& box,
                                    const Budget& budget = {},
                                    CountStrategy strategy = CountStrategy::automatic);

}  // namespace weylsys
