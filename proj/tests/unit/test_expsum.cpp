#include <chrono>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/expsum.hpp"
#include "weylsys/linalg.hpp"
#include "weylsys/parser.hpp"

using namespace weylsys;

namespace {

Alpha random_alpha(std::mt19937_64& rng, int r) {
  RationalVector a(static_cast<std::size_t>(r));
  for (auto& v : a) v = oracle::random_rational(rng, 30);
  return Alpha(a);
}

FormSystem recovery_system() {
  std::string f1, f2;
  for (int i = 1; i <= 20; ++i) {
    f1 += (i > 1 ? " + " : "") + std::to_string(i) + "*x" + std::to_string(i) + "^2";
    f2 += (i > 1 ? " + " : "") + std::to_string(i) + "*x" + std::to_string(20 + i) + "^2";
  }
  return FormSystem({parse_polynomial(f1, 40), parse_polynomial(f2, 40)});
}

}  // namespace

TEST_CASE("S(0) is the number of points") {
  const FormSystem sys({parse_polynomial("x1^2 + x2*x3", 3)});
  const auto res = weyl_sum(sys, Alpha::parse({"0"}), LatticeBox::unit(3), 3);
  CHECK(res.value.real() == 343);
  CHECK(res.value.imag() == 0);
  CHECK(res.num_points == 343);
  CHECK(res.normalized_modulus == 1);
}

TEST_CASE("five-term sum for x1^2 at alpha = 1/2") {
  const FormSystem sys({parse_polynomial("x1^2", 1)});
  const auto res = weyl_sum(sys, Alpha::parse({"1/2"}), LatticeBox::unit(1), 2);
  CHECK(std::fabs(res.value.real() - 1) < 1e-12);
  CHECK(std::fabs(res.value.imag()) < 1e-12);
}

TEST_CASE("Weyl sums agree with the oracle") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 30; ++t) {
    const int s = 1 + static_cast<int>(rng() % 3), d = 2 + static_cast<int>(rng() % 2), r = 1 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_system(rng, s, d, r, 4, 9);
    const auto alpha = random_alpha(rng, r);
    std::vector<oracle::Poly> polys;
    for (const auto& f : sys.forms()) polys.push_back(oracle::from_form(f));
    const auto expected = oracle::weyl_sum(polys, *alpha.exact(), oracle::cube(s, 6));
    const auto got = weyl_sum(sys, alpha, LatticeBox::unit(s), 6);
    CHECK(std::abs(std::complex<long double>(got.value) - expected) < 1e-9L);
  }
}

TEST_CASE("conjugation and periodicity on 100 random alphas") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const int s = 2 + static_cast<int>(rng() % 3), d = 2 + static_cast<int>(rng() % 2), r = 1 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_system(rng, s, d, r, 5, 9);
    const auto box = LatticeBox::unit(s);
    const Alpha exact = random_alpha(rng, r);
    const auto base = weyl_sum(sys, exact, box, 7);
    const auto conj = weyl_sum(sys, exact.negated(), box, 7);
    const auto shift = weyl_sum(sys, exact.shifted(rng() % static_cast<unsigned>(r), 3), box, 7);
    // Exact phases: identical reductions give identical sums.
    CHECK(conj.value == std::conj(base.value));
    CHECK(shift.value == base.value);
    CHECK(std::abs(base.value) <= base.num_points.get_d() * (1 + 1e-12));

    std::vector<double> a(static_cast<std::size_t>(r));
    for (auto& v : a) v = u(rng);
    const Alpha flt(a);
    const auto fb = weyl_sum(sys, flt, box, 7);
    const auto fc = weyl_sum(sys, flt.negated(), box, 7);
    std::vector<double> shifted = a;
    shifted[0] += 1;
    const auto fs = weyl_sum(sys, Alpha(shifted), box, 7);
    const double tol = 1e-9 * fb.num_points.get_d();
    CHECK(std::abs(fc.value - std::conj(fb.value)) <= tol);
    CHECK(std::abs(fs.value - fb.value) <= tol);
  }
}

TEST_CASE("float and exact paths agree on dyadic alphas") {
  const FormSystem sys({parse_polynomial("x1^2 + 3*x1*x2 - x2^2", 2)});
  const auto e = weyl_sum(sys, Alpha::parse({"3/8"}), LatticeBox::unit(2), 20);
  const auto f = weyl_sum(sys, Alpha::parse({"~0.375"}), LatticeBox::unit(2), 20);
  CHECK(e.exact_phases);
  CHECK_FALSE(f.exact_phases);
  CHECK(std::abs(e.value - f.value) < 1e-9 * 1681);
}

TEST_CASE("Weyl sums do not depend on the worker count") {
  const FormSystem sys({parse_polynomial("x1^3 + x1*x2*x3 - 2*x3^3", 3)});
  Budget one, four;
  four.workers = 4;
  const auto alpha = Alpha::parse({"~0.1234567"});
  CHECK(weyl_sum(sys, alpha, LatticeBox::unit(3), 15, one).value == weyl_sum(sys, alpha, LatticeBox::unit(3), 15, four).value);
}

TEST_CASE("rational approximation search") {
  auto r = rational_approx_search(Alpha::parse({"3/7"}), 10, 0);
  REQUIRE(r);
  CHECK(r->q == 7);
  CHECK(r->a == IntVector{3});
  r = rational_approx_search(Alpha::parse({"1/2", "1/3"}), 6, 0);
  REQUIRE(r);
  CHECK(r->q == 6);
  CHECK(r->a == IntVector{3, 2});
  CHECK_FALSE(rational_approx_search(Alpha::parse({"~0.6180339887498949"}), 50, 1e-4));
  CHECK_FALSE(rational_approx_search(Alpha::parse({"1/11"}), 10, 0));
  CHECK_THROWS_AS(rational_approx_search(Alpha::parse({"1/2"}), 0, 0), InputError);
}

TEST_CASE("dichotomy recovers q and a for rational alpha") {
  const auto sys = recovery_system();
  const auto box = LatticeBox::unit(40);
  for (const auto& [a1, a2, q] : std::vector<std::tuple<int, int, int>>{{3, 5, 7}, {1, 0, 20}, {7, 11, 13}, {1, 1, 2}}) {
    const auto alpha = Alpha(RationalVector{Rational(a1, q), Rational(a2, q)});
    const auto rep = dichotomy_experiment(sys, alpha, Rational(1, 2), 32, box);
    CHECK(rep.psi_case == "I");
    CHECK(rep.psi_matrix_rank == 2);
    REQUIRE(rep.certificate);
    CHECK(rep.certificate->q == q);
    CHECK(rep.certificate->a == std::vector<Integer>{a1, a2});
    CHECK(*rep.certificate->exact_error == 0);
    CHECK(rep.holds_ii);
  }
}

TEST_CASE("dichotomy finds the kernel of a degenerate pencil") {
  const FormSystem sys({parse_polynomial("x1^2 + x2^2 - x3*x4", 4), parse_polynomial("2*x1^2 + 2*x2^2 - 2*x3*x4", 4)});
  // Nonzero rows survive only when a1 + 2 a2 is near a multiple of 1/2; the
  // kernel must come out the same either way.
  for (const auto& [a1, a2, rank] : std::vector<std::tuple<std::string, std::string, std::size_t>>{
           {"1/10", "1/5", 1}, {"~0.5", "1/4", 1}, {"3/5", "1/5", 1}, {"~0.377", "1/5", 0}, {"2/3", "1/5", 0}}) {
    const auto rep = dichotomy_experiment(sys, Alpha::parse({a1, a2}), Rational(1, 2), 32, LatticeBox::unit(4));
    CHECK(rep.psi_case == "II");
    CHECK(rep.psi_matrix_rank == rank);
    REQUIRE(rep.kernel_vector);
    CHECK(*rep.kernel_vector == IntVector{2, -1});
    CHECK(rep.kernel_count_M);
  }
}

TEST_CASE("dichotomy: badly approximable alpha on a positive definite form") {
  const FormSystem sys({parse_polynomial("x1^2 + x2^2 + x3^2 + x4^2 + x5^2", 5)});
  const auto rep = dichotomy_experiment(sys, Alpha::parse({"~0.6180339887498949"}), Rational(1, 2), 64, LatticeBox::unit(5));
  CHECK(rep.k_source == "pencil-rank");
  CHECK(rep.k == doctest::Approx(2.5 * 0.5 - 0.01));
  CHECK(rep.holds_i);
  CHECK(rep.weyl.normalized_modulus < std::pow(64.0, -rep.k));
}

TEST_CASE("kernel vectors annihilate the collected rows") {
  std::mt19937_64 rng(63);
  for (int t = 0; t < 10; ++t) {
    const auto base = oracle::random_form(rng, 3, 2, 4, 5);
    if (base.is_zero()) continue;
    const std::int64_t m1 = 1 + static_cast<std::int64_t>(rng() % 3), m2 = 1 + static_cast<std::int64_t>(rng() % 3);
    std::vector<Monomial> s1, s2;
    for (auto m : base.monomials()) {
      s1.push_back({m.indices, m.coefficient * m1});
      s2.push_back({m.indices, m.coefficient * m2});
    }
    const FormSystem sys({Form::from_monomials(s1, 3, 2), Form::from_monomials(s2, 3, 2)});
    const auto rep = dichotomy_experiment(sys, Alpha::parse({"~0.3", "1/7"}), Rational(1, 2), 16, LatticeBox::unit(3));
    if (!rep.kernel_vector) continue;
    const auto& a = *rep.kernel_vector;
    oracle::for_each_point(oracle::cube(3, 4), [&](const oracle::Point& x) {
      for (int j = 0; j < 3; ++j) {
        const std::vector<IntVector> tuple{x};
        CHECK(psi(sys[0], j, tuple) * a[0] + psi(sys[1], j, tuple) * a[1] == 0);
      }
    });
  }
}
