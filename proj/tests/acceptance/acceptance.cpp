// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "weylsys/cli.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/expsum.hpp"
#include "weylsys/hardy_littlewood.hpp"
#include "weylsys/linalg.hpp"
#include "weylsys/multilinear.hpp"
#include "weylsys/parser.hpp"
#include "weylsys/pencil.hpp"
#include "weylsys/system_file.hpp"

using namespace weylsys;
using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

const std::string data = WEYLSYS_DATA_DIR;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

Json cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  if (run_cli(args, out, err) != 0) throw std::runtime_error("cli failed: " + err.str());
  return Json::parse(out.str());
}

std::string shell(const std::string& cmd) {
  std::string out;
  std::FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  if (pclose(pipe) != 0) throw std::runtime_error("command failed: " + cmd);
  return out;
}

// 1 ------------------------------------------------------------------------
void example_pair(Outcome& o) {
  const auto start = Clock::now();
  const auto disc = cli({"discriminant", "--system", data + "/example13.json"});
  const auto roots = cli({"rational-roots", "--system", data + "/example13.json"});
  const auto rank = cli({"pencil-rank", "--system", data + "/example13.json", "--height", "10"});
  const double t = seconds_since(start);
  const auto& r = rank["outputs"];
  o.require(disc["outputs"]["form"]["degree"] == 13, "discriminant degree");
  o.require(roots["outputs"]["num_roots"] == 0, "rational root found");
  o.require(r["min_rank_found"] == 13, "min rank " + r["min_rank_found"].dump());
  o.require(r["certified"] == true, "not certified");
  o.require(t < 60, "took " + std::to_string(t) + " s");
  o.detail << "degree 13, " << roots["outputs"]["num_roots"] << " rational roots, min rank " << r["min_rank_found"]
           << ", certified " << r["certified"] << ", " << t << " s";
}

// 2 ------------------------------------------------------------------------
void identities(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  int euler = 0, phi_exact = 0, phi_float = 0, multi = 0, period = 0, conj = 0;
  for (int t = 0; t < 100; ++t) {
    const int s = 1 + static_cast<int>(rng() % 5), d = 2 + static_cast<int>(rng() % 3), r = 1 + static_cast<int>(rng() % 3);
    const auto sys = oracle::random_system(rng, s, d, r, 5, 30);
    const Integer fact = d == 2 ? 2 : d == 3 ? 6 : 24;

    std::vector<Rational> xq(static_cast<std::size_t>(s));
    for (auto& v : xq) v = oracle::random_rational(rng, 9);
    const auto g = sys[0].gradient(xq);
    Rational dot = 0;
    for (int j = 0; j < s; ++j) dot += xq[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
    euler += dot == d * sys[0].eval(xq);

    RationalVector aq(static_cast<std::size_t>(r));
    for (auto& v : aq) v = oracle::random_rational(rng, 17);
    std::vector<double> af(static_cast<std::size_t>(r));
    for (auto& v : af) v = u(rng);
    const auto x = oracle::random_point(rng, s, 10);
    const std::vector<IntVector> diag(static_cast<std::size_t>(d - 1), x);
    Rational lq = 0, rq = 0;
    double lf = 0, rf = 0;
    for (int j = 0; j < s; ++j) {
      lq += x[static_cast<std::size_t>(j)] * phi(sys, aq, j, diag);
      lf += static_cast<double>(x[static_cast<std::size_t>(j)]) * phi(sys, af, j, diag);
    }
    for (int i = 0; i < r; ++i) {
      const Integer fx = sys[static_cast<std::size_t>(i)].eval(std::span<const std::int64_t>(x));
      rq += aq[static_cast<std::size_t>(i)] * fx;
      rf += af[static_cast<std::size_t>(i)] * fx.get_d();
    }
    phi_exact += lq == fact * rq;
    phi_float += std::fabs(lf - fact.get_d() * rf) <= 1e-9 * std::max(1.0, std::fabs(fact.get_d() * rf));

    std::vector<IntVector> tuple;
    for (int k = 0; k < d - 1; ++k) tuple.push_back(oracle::random_point(rng, s, 8));
    const auto v = oracle::random_point(rng, s, 8);
    const std::size_t slot = rng() % static_cast<unsigned>(d - 1);
    const int j = static_cast<int>(rng() % static_cast<unsigned>(s));
    auto with_v = tuple, sum = tuple, swapped = tuple;
    with_v[slot] = v;
    for (int k = 0; k < s; ++k) sum[slot][static_cast<std::size_t>(k)] += 3 * v[static_cast<std::size_t>(k)];
    std::swap(swapped.front(), swapped.back());
    const Form& f = sys[0];
    multi += psi(f, j, sum) == psi(f, j, tuple) + 3 * psi(f, j, with_v) && psi(f, j, swapped) == psi(f, j, tuple);

    const auto box = LatticeBox::unit(s);
    const Rational P = s <= 3 ? 6 : 3;
    const Alpha exact(aq), flt(af);
    const auto se = weyl_sum(sys, exact, box, P);
    const auto sf = weyl_sum(sys, flt, box, P);
    std::vector<double> af_shift = af;
    af_shift[static_cast<std::size_t>(r - 1)] -= 2;
    const double tol = 1e-9 * sf.num_points.get_d();
    period += weyl_sum(sys, exact.shifted(0, 5), box, P).value == se.value &&
              std::abs(weyl_sum(sys, Alpha(af_shift), box, P).value - sf.value) <= tol;
    conj += weyl_sum(sys, exact.negated(), box, P).value == std::conj(se.value) &&
            std::abs(weyl_sum(sys, flt.negated(), box, P).value - std::conj(sf.value)) <= tol;
  }
  o.require(euler == 100, "Euler " + std::to_string(euler));
  o.require(phi_exact == 100, "Phi/F exact " + std::to_string(phi_exact));
  o.require(phi_float == 100, "Phi/F float " + std::to_string(phi_float));
  o.require(multi == 100, "Psi multilinear/symmetric " + std::to_string(multi));
  o.require(period == 100, "periodicity " + std::to_string(period));
  o.require(conj == 100, "conjugation " + std::to_string(conj));
  o.detail << "Euler " << euler << "/100, Phi/F " << phi_exact << "+" << phi_float << "/200, Psi " << multi
           << "/100, periodicity " << period << "/100, conjugation " << conj << "/100";
}

// 3 ------------------------------------------------------------------------
void oracle_equivalences(Outcome& o) {
  std::mt19937_64 rng(303);
  int m_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const int s = 2 + static_cast<int>(rng() % 4), r = 1 + static_cast<int>(rng() % 3);
    const auto sys = oracle::random_system(rng, s, 2, r, 2 + static_cast<int>(rng() % 4), 3);
    IntVector a(static_cast<std::size_t>(r));
    do
      for (auto& v : a) v = static_cast<std::int64_t>(rng() % 7) - 3;
    while (gcd_of(a) == 0);
    const PencilVector pv(a);
    const auto member = oracle::from_form(pencil_combine(sys, pv));
    RationalMatrix m(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = oracle::sym_coefficient(member, {i, j});
    const Rational H = 2 + static_cast<long>(rng() % 5);
    m_ok += count_M(sys, pv, H, LatticeBox::unit(s)).count == kernel_lattice_count(m, LatticeBox::unit(s), H).count;
  }
  const FormSystem pyth({parse_polynomial("x1^2 + x2^2 - x3^2", 3)});
  const auto rho = count_zeros(pyth, LatticeBox::unit(3), 5).count;
  const auto rho_oracle = oracle::count_zeros({oracle::from_form(pyth[0])}, oracle::cube(3, 5));
  int crt = 0, pairs = 0;
  while (pairs < 20) {
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng() % 15), n = 2 + static_cast<std::int64_t>(rng() % 15);
    if (std::gcd(m, n) != 1) continue;
    ++pairs;
    const auto sys = oracle::random_system(rng, 3, 2 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2), 4, 25);
    crt += count_zeros_mod(sys, m * n).count == count_zeros_mod(sys, m).count * count_zeros_mod(sys, n).count;
  }
  o.require(m_ok == 50, "count_M vs kernel " + std::to_string(m_ok));
  o.require(rho == 57 && rho_oracle == 57, "rho(5) = " + to_string(rho) + ", oracle " + std::to_string(rho_oracle));
  o.require(crt == 20, "CRT " + std::to_string(crt));
  o.detail << "count_M = kernel count " << m_ok << "/50, rho(5) = " << to_string(rho) << " (oracle " << rho_oracle
           << "), CRT " << crt << "/20";
}

// 4 ------------------------------------------------------------------------
// Quadratic form x^T U^T D U x with U unimodular (signed permutation times
// small shears), so the kernel lattice has a short basis.
IntMatrix unimodular(std::mt19937_64& rng, int s) {
  IntMatrix u(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
  std::vector<int> perm(static_cast<std::size_t>(s));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < s; ++i) u(static_cast<std::size_t>(i), static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])) = rng() % 2 ? 1 : -1;
  for (int k = 0; k < 2; ++k) {
    const std::size_t a = rng() % static_cast<unsigned>(s), b = rng() % static_cast<unsigned>(s);
    if (a == b) continue;
    const int c = rng() % 2 ? 1 : -1;
    for (std::size_t j = 0; j < static_cast<std::size_t>(s); ++j) u(a, j) += c * u(b, j);
  }
  return u;
}

void exponent_fit(Outcome& o) {
  std::mt19937_64 rng(404);
  const std::int64_t heights[] = {4, 8, 16, 32};
  int ok = 0;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const int s = 3 + static_cast<int>(rng() % 2), r = 1 + static_cast<int>(rng() % 2);
    const int rk = 1 + static_cast<int>(rng() % static_cast<unsigned>(s - 1));
    const auto u = unimodular(rng, s);
    std::vector<Monomial> q;
    for (int i = 0; i < rk; ++i) {
      const std::int64_t lambda = (rng() % 2 ? 1 : -1) * static_cast<std::int64_t>(1 + rng() % 3);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
          const std::int64_t c = lambda * u(static_cast<std::size_t>(i), static_cast<std::size_t>(a)).get_si() *
                                 u(static_cast<std::size_t>(i), static_cast<std::size_t>(b)).get_si();
          if (c) q.push_back({{a, b}, c});
        }
    }
    const Form member = Form::from_monomials(q, s, 2);
    std::vector<Form> forms{member};
    IntVector a{1};
    if (r == 2) {
      // F1 = member - c F2, so the pencil vector (1, c) gives the member back.
      const Form f2 = oracle::random_form(rng, s, 2, 4, 4);
      const std::int64_t c = 1 + static_cast<std::int64_t>(rng() % 3);
      std::vector<Monomial> f1 = member.monomials();
      for (auto m : f2.monomials()) f1.push_back({m.indices, -c * m.coefficient});
      forms = {Form::from_monomials(f1, s, 2), f2};
      a = {1, c};
    }
    const FormSystem sys(forms);
    const PencilVector pv(a);
    const int expected = s - static_cast<int>(rank_quadratic(pencil_combine(sys, pv)));
    const auto fit = fit_M_exponent(sys, pv, heights, LatticeBox::unit(s));
    const double err = std::fabs(fit.slope - expected);
    worst = std::max(worst, err);
    ok += err <= 0.15;
  }
  o.require(ok == 20, std::to_string(ok) + "/20 within 0.15");
  o.detail << ok << "/20 pencils within 0.15, worst error " << worst;
}

// 5 ------------------------------------------------------------------------
void dichotomy(Outcome& o) {
  std::string f1, f2;
  for (int i = 1; i <= 20; ++i) {
    f1 += (i > 1 ? " + " : "") + std::to_string(i) + "*x" + std::to_string(i) + "^2";
    f2 += (i > 1 ? " + " : "") + std::to_string(i) + "*x" + std::to_string(20 + i) + "^2";
  }
  const FormSystem sys({parse_polynomial(f1, 40), parse_polynomial(f2, 40)});
  std::mt19937_64 rng(505);
  int recovered = 0, runs = 0;
  double slowest = 0;
  for (std::int64_t q = 1; q <= 20; ++q) {
    std::int64_t a1, a2;
    do {
      a1 = static_cast<std::int64_t>(rng() % static_cast<unsigned>(q));
      a2 = static_cast<std::int64_t>(rng() % static_cast<unsigned>(q));
    } while (std::gcd(std::gcd(a1, a2), q) != 1);
    const auto start = Clock::now();
    const auto rep = dichotomy_experiment(sys, Alpha(RationalVector{Rational(a1, q), Rational(a2, q)}), Rational(1, 2), 32,
                                          LatticeBox::unit(40));
    slowest = std::max(slowest, seconds_since(start));
    ++runs;
    const bool ok = rep.certificate && rep.certificate->q == q &&
                    rep.certificate->a == std::vector<Integer>{Integer(static_cast<long>(a1)), Integer(static_cast<long>(a2))} &&
                    rep.certificate->exact_error && *rep.certificate->exact_error == 0;
    if (!ok) o.require(false, "q = " + std::to_string(q) + " not recovered");
    recovered += ok;
  }
  const FormSystem degenerate({parse_polynomial("x1^2 + x2^2 - x3*x4 + 2*x1*x3", 4),
                               parse_polynomial("2*x1^2 + 2*x2^2 - 2*x3*x4 + 4*x1*x3", 4)});
  const auto start = Clock::now();
  const auto rep = dichotomy_experiment(degenerate, Alpha::parse({"~0.31415926535", "2/7"}), Rational(1, 2), 32,
                                        LatticeBox::unit(4));
  slowest = std::max(slowest, seconds_since(start));
  const bool kernel = rep.kernel_vector && *rep.kernel_vector == IntVector{2, -1};
  o.require(kernel, "kernel vector");
  o.require(slowest < 30, "slowest experiment " + std::to_string(slowest) + " s");
  o.detail << recovered << "/" << runs << " certificates exact (q = 1..20), kernel "
           << (rep.kernel_vector ? Json(*rep.kernel_vector).dump() : "none") << ", slowest " << slowest << " s";
}

// 6 ------------------------------------------------------------------------
void hardy_littlewood(Outcome& o) {
  const auto start = Clock::now();
  const auto doc = cli({"asymptotic", "--system", data + "/meyer5.json", "--P", "10,20,40,80", "--seed", "1"});
  const double t = seconds_since(start);
  const auto& out = doc["outputs"];
  const auto& rows = out["rows"];
  const double last = std::fabs(rows.back()["relative_deviation"].get<double>());
  o.require(last < 0.15, "final deviation " + std::to_string(last));
  o.require(out["monotone"] == true, "deviation not monotone");
  o.require(out["verdict"] == "consistent", "verdict " + out["verdict"].dump());
  o.require(t < 600, "took " + std::to_string(t) + " s");
  o.detail << "predicted " << rows.back()["predicted"].get<double>() << ", ratios";
  for (const auto& row : rows) o.detail << " " << row["ratio"].get<double>();
  o.detail << ", deviations";
  for (const auto& row : rows) o.detail << " " << row["relative_deviation"].get<double>();
  o.detail << ", " << t << " s";
}

// 7 ------------------------------------------------------------------------
void dimension(Outcome& o) {
  std::mt19937_64 rng(707);
  const std::int64_t primes[] = {5, 7, 11};
  int ok = 0, members = 0;
  while (members < 20) {
    const int s = 2 + static_cast<int>(rng() % 4), r = 1 + static_cast<int>(rng() % 2);
    const auto sys = oracle::random_system(rng, s, 2, r, 1 + static_cast<int>(rng() % 5), 4);
    IntVector a(static_cast<std::size_t>(r));
    do
      for (auto& v : a) v = static_cast<std::int64_t>(rng() % 5) - 2;
    while (gcd_of(a) == 0);
    const Form member = pencil_combine(sys, PencilVector(a));
    if (member.is_zero()) continue;
    const auto est = vstar_dim_estimate(member, primes);
    if (est.bad_primes.size() == 3) continue;
    ++members;
    const int expected = s - static_cast<int>(rank_quadratic(member));
    bool exact = std::fabs(est.estimate - expected) < 1e-9;
    for (const auto& pc : est.per_prime) {
      if (pc.bad) continue;
      u128 want = 1;
      for (int k = 0; k < expected; ++k) want *= static_cast<u128>(pc.p);
      exact = exact && pc.count == want;
    }
    ok += exact;
  }
  o.require(ok == 20, std::to_string(ok) + "/20");
  o.detail << ok << "/20 members with estimate = s - rank";
}

// 8 ------------------------------------------------------------------------
void determinism(Outcome& o) {
  const std::string bin = WEYLSYS_CLI_PATH;
  const std::vector<std::string> commands{
      "count --system " + data + "/meyer5.json --P 10,20",
      "count-mod --system " + data + "/meyer5.json --modulus 12",
      "expsum --system " + data + "/example13.json --alpha ~0.61803398875,1/3 --P 6",
      "dichotomy --system " + data + "/example13.json --alpha 2/5,1/5 --P 16",
      "pencil-rank --system " + data + "/example13.json --height 4 --seed 3",
      "discriminant --system " + data + "/example13.json",
      "rational-roots --system " + data + "/example13.json",
      "hinv --system " + data + "/fermat_cubic.json --H 8",
      "vstar-dim --system " + data + "/example13.json --a 1,-1",
      "singular-series --system " + data + "/pyth.json --p-max 13",
      "singular-integral --system " + data + "/meyer5.json --samples 200000 --seed 9 --workers 2",
      "asymptotic --system " + data + "/pyth.json --P 5,10 --samples 50000 --seed 4",
      "constants --system " + data + "/example13.json",
  };
  int same = 0;
  for (const auto& c : commands) {
    const std::string cmd = bin + " " + c + " 2>/dev/null";
    const std::string a = shell(cmd), b = shell(cmd);
    const bool ok = !a.empty() && a == b;
    if (!ok) o.require(false, c.substr(0, c.find(' ')));
    same += ok;
  }
  o.detail << same << "/" << commands.size() << " commands byte-identical across two runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"13-variable pair: no rational discriminant root, min pencil rank 13, certified", example_pair},
      {"exact identities on randomized instances", identities},
      {"oracle equivalences: M vs kernel count, rho(5) = 57, CRT", oracle_equivalences},
      {"growth exponent of M(a;H) equals s - rank", exponent_fit},
      {"dichotomy: certificates for q <= 20 and the degenerate kernel", dichotomy},
      {"rho(P)/P^3 against the predicted main term for the quinary form", hardy_littlewood},
      {"singular locus dimension mod p equals s - rank", dimension},
      {"byte-identical result documents", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail.str() << ")" << std::endl;
  }
  return failed ? 1 : 0;
}
