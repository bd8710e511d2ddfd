#include "weylsys/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "weylsys/budget.hpp"
#include "weylsys/errors.hpp"

namespace weylsys {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
  return to_string(static_cast<u128>(v));
}

Integer to_integer(u128 v) { return Integer(to_string(v)); }
Integer to_integer(i128 v) { return Integer(to_string(v)); }

i128 to_i128(const Integer& v) {
  static const Integer kMax = to_integer(static_cast<i128>(~static_cast<u128>(0) >> 1));
  if (abs(v) > kMax) throw std::overflow_error("integer does not fit in 128 bits");
  if (v.fits_slong_p()) return static_cast<i128>(v.get_si());
  Integer q = abs(v);
  u128 out = 0;
  // Most significant limb first.
  const std::size_t limbs = mpz_size(q.get_mpz_t());
  for (std::size_t k = limbs; k-- > 0;) {
    out = (out << 64) | static_cast<u128>(mpz_getlimbn(q.get_mpz_t(), static_cast<mp_size_t>(k)));
  }
  return v < 0 ? -static_cast<i128>(out) : static_cast<i128>(out);
}

std::int64_t to_int64(const Integer& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
  return v.get_si();
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite real value");
  Rational q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != ' ' && c != '\t') text.push_back(c);
  if (text.empty()) throw InputError("empty rational literal");
  auto is_digits = [](const std::string& s, std::size_t from) {
    if (from >= s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(from), s.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  const std::size_t sign = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_digits(num, sign) || !is_digits(den, 0)) throw InputError("malformed rational '" + raw + "'");
    if (num[0] == '+') num.erase(0, 1);
    const Integer d(den, 10);
    if (d == 0) throw InputError("zero denominator in '" + raw + "'");
    Rational q{Integer(num, 10), d};
    q.canonicalize();
    return q;
  }
  // Decimal with optional fraction and exponent.
  std::size_t pos = sign;
  std::string digits;
  long scale = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) digits.push_back(text[pos++]);
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits.push_back(text[pos++]);
      --scale;
    }
  }
  if (digits.empty()) throw InputError("malformed number '" + raw + "'");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    const std::string exponent = text.substr(pos);
    const std::size_t esign = (!exponent.empty() && (exponent[0] == '-' || exponent[0] == '+')) ? 1 : 0;
    if (!is_digits(exponent, esign) || exponent.size() > 6) throw InputError("malformed exponent in '" + raw + "'");
    scale += std::stol(exponent);
    pos = text.size();
  }
  if (pos != text.size()) throw InputError("malformed number '" + raw + "'");
  Integer num(digits, 10);
  if (text[0] == '-') num = -num;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow, 1);
  q.canonicalize();
  return q;
}

Integer floor_rational(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Integer ceil_rational(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Integer gcd_of(const std::vector<Integer>& values) {
  Integer g = 0;
  for (const auto& v : values) g = gcd(g, v);
  return g;
}

std::int64_t gcd_of(const IntVector& values) {
  std::int64_t g = 0;
  for (auto v : values) g = std::gcd(g, v < 0 ? -v : v);
  return g;
}

std::string FeasibilityError::format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void Budget::require(double cost, const std::string& what) const {
  if (!(cost <= ceiling)) throw FeasibilityError(what, cost, ceiling);
}

}  // namespace weylsys
