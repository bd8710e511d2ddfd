#include "weylsys/factor.hpp"

#include <algorithm>
#include <map>

#include "weylsys/errors.hpp"

namespace weylsys {
namespace {

bool probable_prime(const Integer& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

Integer pollard_rho(const Integer& n) {
  if (n % 2 == 0) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer x = 2, y = 2, d = 1;
    auto step = [&](Integer& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    while (d == 1) {
      step(x);
      step(y);
      step(y);
      Integer diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void split(const Integer& n, std::map<Integer, int>& out) {
  if (n == 1) return;
  if (probable_prime(n)) {
    ++out[n];
    return;
  }
  const Integer d = pollard_rho(n);
  split(d, out);
  split(n / d, out);
}

}  // namespace

std::vector<std::pair<Integer, int>> factorize(const Integer& value) {
  if (value == 0) throw InputError("cannot factor zero");
  Integer n = abs(value);
  std::map<Integer, int> found;
  for (unsigned long p = 2; p < 10000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++found[Integer(p)];
      n /= p;
    }
  }
  split(n, found);
  return {found.begin(), found.end()};
}

std::vector<Integer> divisors(const Integer& n, std::size_t limit) {
  const auto factors = factorize(n);
  double estimate = 1;
  for (const auto& [p, e] : factors) estimate *= e + 1;
  if (estimate > static_cast<double>(limit)) throw FeasibilityError("divisor enumeration", estimate, static_cast<double>(limit));
  std::vector<Integer> out{1};
  for (const auto& [p, e] : factors) {
    const std::size_t base = out.size();
    Integer power = 1;
    for (int k = 1; k <= e; ++k) {
      power *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * power);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace weylsys
