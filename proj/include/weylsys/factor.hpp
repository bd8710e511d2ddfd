#pragma once

#include <utility>
#include <vector>

#include "weylsys/arith.hpp"

namespace weylsys {

/// Prime factorization of |n| (n != 0), primes ascending.
std::vector<std::pair<Integer, int>> factorize(const Integer& n);

/// Positive divisors of |n|, ascending. Throws FeasibilityError past `limit`.
std::vector<Integer> divisors(const Integer& n, std::size_t limit = 2'000'000);

bool is_prime(std::int64_t n);

}  // namespace weylsys
