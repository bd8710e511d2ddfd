#pragma once

#include <cstdint>
#include <string>

#include "weylsys/arith.hpp"
#include "weylsys/budget.hpp"
#include "weylsys/form.hpp"
#include "weylsys/linalg.hpp"
#include "weylsys/poly_system.hpp"

namespace weylsys {

struct CountResult {
  u128 count = 0;
  /// The P, H or modulus the count refers to.
  Rational scale;
  double elapsed_seconds = 0.0;
  /// "brute-force", "split", "block-product" or "kernel-parametrization".
  std::string method;
  /// Estimated elementary operations for the chosen method.
  double cost = 0.0;
};

enum class CountStrategy {
  automatic,    ///< split when the variables decompose and that is cheaper
  brute_force,  ///< lexicographic enumeration, early exit on the first form
  split,        ///< block histograms joined in the middle
};

/// rho(P): integer x in the closed box P*B with F_1(x) = ... = F_r(x) = 0.
CountResult count_zeros(const FormSystem& system, const LatticeBox& box, const Rational& scale,
                        const Budget& budget = {}, CountStrategy strategy = CountStrategy::automatic);

/// Common zeros of arbitrary integer polynomials over the given ranges.
CountResult count_poly_zeros(const PolySystem& system, std::span<const IntRange> ranges,
                             const Budget& budget = {},
                             CountStrategy strategy = CountStrategy::automatic);

/// #{x in (Z/M)^s : F_i(x) = 0 mod M for all i}, from the integer monomials.
CountResult count_zeros_mod(const FormSystem& system, std::int64_t modulus, const Budget& budget = {},
                            CountStrategy strategy = CountStrategy::automatic);

CountResult count_poly_zeros_mod(const PolySystem& system, std::int64_t modulus,
                                 const Budget& budget = {},
                                 CountStrategy strategy = CountStrategy::automatic);

/// Estimated cost of counting zeros mod M with the strategy `automatic` would pick.
double count_mod_cost(const PolySystem& system, std::int64_t modulus);

/// Integer points of ker(matrix) inside H*B, by exact elimination to a
/// parametrized kernel followed by enumeration of the free coordinates.
CountResult kernel_lattice_count(const RationalMatrix& matrix, const LatticeBox& box, const Rational& scale,
                                 const Budget& budget = {});

}  // namespace weylsys
