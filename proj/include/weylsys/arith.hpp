#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace weylsys {

using Integer = mpz_class;
using Rational = mpq_class;

using i128 = __int128;
using u128 = unsigned __int128;

using IntVector = std::vector<std::int64_t>;
using RationalVector = std::vector<Rational>;

std::string to_string(i128 v);
std::string to_string(u128 v);

Integer to_integer(i128 v);
Integer to_integer(u128 v);

/// Throws std::overflow_error when the value does not fit.
i128 to_i128(const Integer& v);
std::int64_t to_int64(const Integer& v);

/// Exact rational from a finite double.
Rational rational_from_double(double v);

/// Parses "3", "-3/7" or a decimal like "0.25" exactly.
Rational parse_rational(const std::string& text);

Integer floor_rational(const Rational& q);
Integer ceil_rational(const Rational& q);

/// Smallest representative of x modulo m in [0, m).
inline std::int64_t mod_floor(i128 x, std::int64_t m) {
  i128 r = x % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

Integer gcd_of(const std::vector<Integer>& values);
std::int64_t gcd_of(const IntVector& values);

}  // namespace weylsys
