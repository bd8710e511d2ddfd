#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/parser.hpp"

using namespace weylsys;

namespace {

std::vector<oracle::Poly> polys_of(const FormSystem& sys) {
  std::vector<oracle::Poly> out;
  for (const auto& f : sys.forms()) out.push_back(oracle::from_form(f));
  return out;
}

}  // namespace

TEST_CASE("rho(5) for x1^2 + x2^2 - x3^2 on the unit cube") {
  const FormSystem sys({parse_polynomial("x1^2 + x2^2 - x3^2", 3)});
  CHECK(oracle::count_zeros(polys_of(sys), oracle::cube(3, 5)) == 57);
  CHECK(count_zeros(sys, LatticeBox::unit(3), 5).count == 57);
  CHECK(count_zeros(sys, LatticeBox::unit(3), 5, {}, CountStrategy::brute_force).count == 57);
  CHECK(count_zeros(sys, LatticeBox::unit(3), 5, {}, CountStrategy::split).count == 57);
}

TEST_CASE("brute force, split and the oracle agree") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    const int s = 2 + static_cast<int>(rng() % 3), d = 2 + static_cast<int>(rng() % 2), r = 1 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_system(rng, s, d, r, 3, 3);
    const std::int64_t P = 3 + static_cast<std::int64_t>(rng() % 3);
    const auto expected = oracle::count_zeros(polys_of(sys), oracle::cube(s, P));
    CHECK(count_zeros(sys, LatticeBox::unit(s), P, {}, CountStrategy::brute_force).count == expected);
    CHECK(count_zeros(sys, LatticeBox::unit(s), P, {}, CountStrategy::split).count == expected);
    Budget parallel;
    parallel.workers = 3;
    CHECK(count_zeros(sys, LatticeBox::unit(s), P, parallel).count == expected);
  }
}

TEST_CASE("rational boxes and scales") {
  const FormSystem sys({parse_polynomial("x1^2 - x2^2", 2)});
  const LatticeBox box({{Rational(0), Rational(1)}, {Rational(-1, 2), Rational(1)}});
  // x in [0, 7/2] -> 0..3, y in [-7/4, 7/2] -> -1..3; zeros: (0,0),(1,1),(1,-1),(2,2),(3,3)
  CHECK(count_zeros(sys, box, Rational(7, 2)).count == 5);
}

TEST_CASE("counts modulo M agree with the oracle") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 30; ++t) {
    const int s = 2 + static_cast<int>(rng() % 3), d = 2 + static_cast<int>(rng() % 2), r = 1 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_system(rng, s, d, r, 4, 10);
    const std::int64_t M = 2 + static_cast<std::int64_t>(rng() % 11);
    const auto expected = oracle::count_zeros_mod(polys_of(sys), M);
    CHECK(count_zeros_mod(sys, M, {}, CountStrategy::brute_force).count == expected);
    CHECK(count_zeros_mod(sys, M).count == expected);
  }
  CHECK(count_zeros_mod(FormSystem({parse_polynomial("x1^2 + x2^2 - x3^2", 3)}), 3).count == 9);
}

TEST_CASE("CRT: count mod mn = count mod m * count mod n") {
  std::mt19937_64 rng(43);
  int pairs = 0;
  while (pairs < 20) {
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng() % 12), n = 2 + static_cast<std::int64_t>(rng() % 12);
    if (std::gcd(m, n) != 1) continue;
    ++pairs;
    const auto sys = oracle::random_system(rng, 3, 2 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2), 4, 20);
    CHECK(count_zeros_mod(sys, m * n).count == count_zeros_mod(sys, m).count * count_zeros_mod(sys, n).count);
  }
}

TEST_CASE("kernel lattice count agrees with enumeration") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 30; ++t) {
    const std::size_t cols = 2 + rng() % 3, rows = cols;
    RationalMatrix m(rows, cols);
    std::vector<oracle::Poly> linear;
    for (std::size_t i = 0; i < rows; ++i) {
      oracle::Poly p;
      p.s = static_cast<int>(cols);
      for (std::size_t j = 0; j < cols; ++j) {
        const std::int64_t v = i + 1 == rows && t % 2 ? 0 : static_cast<std::int64_t>(rng() % 5) - 2;
        m(i, j) = Rational(v, 2);
        std::vector<int> e(cols, 0);
        e[j] = 1;
        if (v) p.terms.emplace_back(v, e);
      }
      linear.push_back(p);
    }
    const auto expected = oracle::count_zeros(linear, oracle::cube(static_cast<int>(cols), 4));
    CHECK(kernel_lattice_count(m, LatticeBox::unit(static_cast<int>(cols)), 4).count == expected);
  }
}

TEST_CASE("feasibility guard refuses expensive counts") {
  const FormSystem sys({parse_polynomial("x1^2 + x2^2 - x3^2", 3)});
  Budget tiny;
  tiny.ceiling = 100;
  CHECK_THROWS_AS(count_zeros(sys, LatticeBox::unit(3), 1000, tiny), FeasibilityError);
  CHECK_THROWS_AS(count_zeros_mod(sys, 1000, tiny), FeasibilityError);
  try {
    count_zeros(sys, LatticeBox::unit(3), 1000, tiny);
  } catch (const FeasibilityError& e) {
    CHECK(e.estimated_cost() > e.ceiling());
  }
}

TEST_CASE("independent blocks make large counts cheap") {
  const FormSystem sys({parse_polynomial("x1^2 + x2^2 + x3^2 - x4^2 - x5^2", 5)});
  const auto res = count_zeros(sys, LatticeBox::unit(5), 80);
  CHECK(res.count == 11965201);
  CHECK(res.method == "split");
}

TEST_CASE("poly systems split variables into blocks") {
  const FormSystem sys({parse_polynomial("x1*x2 + x3^2 + x4*x5", 6), parse_polynomial("x2*x6", 6)});
  const auto blocks = PolySystem::from_forms(sys).variable_blocks();
  CHECK(blocks == std::vector<std::vector<int>>{{0, 1, 5}, {2}, {3, 4}});
}
