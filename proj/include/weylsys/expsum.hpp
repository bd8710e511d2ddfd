#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weylsys/arith.hpp"
#include "weylsys/budget.hpp"
#include "weylsys/form.hpp"
#include "weylsys/multilinear.hpp"

namespace weylsys {

struct WeylSumResult {
  std::complex<double> value;
  /// Exact; 65^40 points are routine.
  Integer num_points;
  double normalized_modulus = 0.0;
  /// Phases reduced exactly modulo 1 (rational alpha).
  bool exact_phases = false;
  std::size_t partitions = 0;
  std::string method;
};

/// S(alpha) = sum over x in P*B of e(alpha_1 F_1(x) + ... + alpha_r F_r(x)).
WeylSumResult weyl_sum(const FormSystem& system, const Alpha& alpha, const LatticeBox& box, const Rational& scale,
                       const Budget& budget = {});

struct RationalApprox {
  std::int64_t q = 1;
  IntVector a;
  /// max_i |q alpha_i - a_i|.
  double max_error = 0.0;
};

/// First q in 1..q_max with max_i |q alpha_i - round(q alpha_i)| <= window.
std::optional<RationalApprox> rational_approx_search(const Alpha& alpha, std::int64_t q_max, double window);

struct Calibration {
  double C1 = 1.0;  ///< alternative (i)
  double C2 = 1.0;  ///< alternative (ii)
  double C3 = 1.0;  ///< alternative (iii)
};

struct DichotomyOptions {
  Calibration calibration;
  double epsilon = 0.01;
  /// Exponent k of alternative (i). Unset: K*theta - epsilon for quadratics
  /// (K from a small-height pencil rank search), the measured k otherwise.
  std::optional<double> k;
  std::size_t row_cap = 100000;
  double guard_band = 1e-9;
  int pencil_height = 3;
};

struct DichotomyCertificate {
  Integer q;
  std::vector<Integer> a;
  double max_error = 0.0;
  /// Exact max_i |q alpha_i - a_i| when alpha is rational.
  std::optional<Rational> exact_error;
};

struct DichotomyReport {
  std::vector<std::string> alpha;
  Rational theta;
  Rational P;
  double P_theta = 0.0;
  double Q = 0.0;
  double k = 0.0;
  std::string k_source;
  double epsilon = 0.0;

  WeylSumResult weyl;
  /// s - log|S| / log P; unset when S vanishes.
  std::optional<double> k_measured;

  Integer n_count;
  std::uint64_t near_threshold = 0;
  std::uint64_t rows_collected = 0;
  std::size_t psi_matrix_rank = 0;
  /// "I", "II" or "inconclusive".
  std::string psi_case;

  std::optional<DichotomyCertificate> certificate;
  std::optional<RationalApprox> search_certificate;
  std::optional<bool> certificates_agree;
  double q_window = 0.0;
  double approx_window = 0.0;

  std::optional<IntVector> kernel_vector;
  std::optional<u128> kernel_count_M;
  double kernel_bound = 0.0;

  bool holds_i = false;
  bool holds_ii = false;
  std::optional<bool> holds_iii;
  double bound_i = 0.0;
};

DichotomyReport dichotomy_experiment(const FormSystem& system, const Alpha& alpha, const Rational& theta,
                                     const Rational& scale, const LatticeBox& box,
                                     const DichotomyOptions& options = {}, const Budget& budget = {});

}  // namespace weylsys
