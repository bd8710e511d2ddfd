#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "weylsys/arith.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/factor.hpp"
#include "weylsys/linalg.hpp"

using namespace weylsys;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int bound, double zero_rate) {
  std::uniform_int_distribution<int> v(-bound, bound);
  std::bernoulli_distribution zero(zero_rate);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = zero(rng) ? 0 : v(rng);
  return m;
}

std::vector<std::vector<Rational>> as_rows(const IntMatrix& m) {
  std::vector<std::vector<Rational>> out(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

RationalMatrix as_rational(const IntMatrix& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-3/7") == Rational(-3, 7));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK(rational_from_double(0.1) == Rational(Integer("3602879701896397"), Integer("36028797018963968")));
}

TEST_CASE("128-bit conversions") {
  const u128 big = u128(1) << 100;
  CHECK(to_string(big) == "1267650600228229401496703205376");
  CHECK(to_integer(big) == Integer("1267650600228229401496703205376"));
  CHECK(to_string(i128(-42)) == "-42");
  CHECK(to_i128(Integer("-170141183460469231731687303715884105727")) == -((i128(1) << 126) - 1) * 2 - 1);
  CHECK_THROWS(to_i128(Integer("170141183460469231731687303715884105728")));
  CHECK_THROWS(to_int64(Integer("9223372036854775808")));
}

TEST_CASE("Bareiss rank and determinant match plain elimination") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    const auto m = random_matrix(rng, rows, cols, 5, 0.4);
    CHECK(rank(m) == oracle::rank(as_rows(m)));
    const auto sq = random_matrix(rng, rows, rows, 9, 0.3);
    CHECK(Rational(determinant(sq)) == oracle::determinant(as_rows(sq)));
  }
}

TEST_CASE("integer kernel basis annihilates and has the right size") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    const std::size_t rows = 1 + rng() % 4, cols = 2 + rng() % 5;
    const auto m = random_matrix(rng, rows, cols, 4, 0.3);
    const auto basis = integer_kernel_basis(as_rational(m));
    CHECK(basis.size() == cols - rank(m));
    for (const auto& v : basis) {
      CHECK(gcd_of(v) == 1);
      for (std::size_t i = 0; i < rows; ++i) {
        Integer dot = 0;
        for (std::size_t j = 0; j < cols; ++j) dot += m(i, j) * v[j];
        CHECK(dot == 0);
      }
    }
  }
}

TEST_CASE("incremental row space") {
  IncrementalRowSpace space(3);
  CHECK(space.insert({Integer(1), Integer(2), Integer(3)}));
  CHECK_FALSE(space.insert({Integer(2), Integer(4), Integer(6)}));
  CHECK(space.insert({Integer(0), Integer(1), Integer(1)}));
  CHECK(space.rank() == 2);
  const auto k = space.kernel();
  REQUIRE(k.size() == 1);
  CHECK(k[0] == std::vector<Integer>{Integer(1), Integer(1), Integer(-1)});
}

TEST_CASE("exact solve") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng() % 5;
    auto m = random_matrix(rng, n, n, 6, 0.1);
    if (determinant(m) == 0) continue;
    RationalVector b(n);
    for (auto& v : b) v = oracle::random_rational(rng, 9);
    const auto x = solve(as_rational(m), b);
    for (std::size_t i = 0; i < n; ++i) {
      Rational row = 0;
      for (std::size_t j = 0; j < n; ++j) row += m(i, j) * x[j];
      CHECK(row == b[i]);
    }
  }
}

TEST_CASE("factorization and divisors") {
  const Integer n("600851475143");
  Integer prod = 1;
  for (const auto& [p, e] : factorize(n)) {
    CHECK(mpz_probab_prime_p(p.get_mpz_t(), 30) > 0);
    for (int i = 0; i < e; ++i) prod *= p;
  }
  CHECK(prod == n);
  CHECK(divisors(Integer(360)).size() == 24);
  CHECK(divisors(Integer(-12)) == std::vector<Integer>{1, 2, 3, 4, 6, 12});
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(91));
}
