#include "weylsys/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "weylsys/counting.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/expsum.hpp"
#include "weylsys/hardy_littlewood.hpp"
#include "weylsys/json_io.hpp"
#include "weylsys/multilinear.hpp"
#include "weylsys/parser.hpp"
#include "weylsys/pencil.hpp"
#include "weylsys/system_file.hpp"

namespace weylsys {
namespace {

struct Common {
  std::string system_path;
  std::vector<std::string> forms;
  int vars = 0;
  unsigned workers = 1;
  double ceiling = 1e9;
  std::uint64_t seed = 1;
  std::string output;
  std::string csv;
  bool envelope = false;
};

struct Outcome {
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::string> csv_header;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class Session {
 public:
  explicit Session(const Common& c, std::ostream& err) : c_(c), err_(err) {}

  const SystemFile& file() {
    if (!file_) {
      if (!c_.system_path.empty() && !c_.forms.empty()) throw InputError("use either --system or --form, not both");
      if (!c_.system_path.empty()) {
        file_ = SystemFile::load(c_.system_path);
      } else if (!c_.forms.empty()) {
        if (c_.vars < 1) throw InputError("--form needs --vars");
        std::vector<Form> parsed;
        for (const auto& f : c_.forms) parsed.push_back(parse_polynomial(f, c_.vars));
        file_ = SystemFile::from_system(FormSystem(std::move(parsed)), LatticeBox::unit(c_.vars));
      } else {
        throw InputError("a system is required: pass --system FILE or --form TEXT --vars S");
      }
    }
    return *file_;
  }

  FormSystem system() { return file().system(); }
  LatticeBox box() { return file().lattice_box(); }

  Json system_json() {
    const auto& f = file();
    Json box = Json::array();
    for (const auto& [l, u] : f.box) box.push_back({l, u});
    return {{"name", f.name}, {"s", f.s}, {"d", f.d}, {"r", f.r}, {"forms", f.forms}, {"box", box}};
  }

  Budget budget() const { return Budget{c_.ceiling, c_.workers}; }

  void progress(const std::string& line) { err_ << line << '\n' << std::flush; }

 private:
  const Common& c_;
  std::ostream& err_;
  std::optional<SystemFile> file_;
};

Alpha alpha_for(const std::vector<std::string>& entries, int r) {
  if (entries.empty()) throw InputError("--alpha is required");
  std::vector<std::string> full = entries;
  if (full.size() == 1 && r > 1) full.assign(static_cast<std::size_t>(r), entries.front());
  if (static_cast<int>(full.size()) != r)
    throw InputError("--alpha needs 1 or r = " + std::to_string(r) + " entries");
  return Alpha::parse(full);
}

CountStrategy strategy_from(const std::string& name) {
  if (name == "auto") return CountStrategy::automatic;
  if (name == "brute-force") return CountStrategy::brute_force;
  if (name == "split") return CountStrategy::split;
  throw InputError("unknown strategy '" + name + "'");
}

Json rationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(json_rational(q));
  return out;
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& v) {
  std::vector<Rational> out;
  for (const auto& s : v) out.push_back(parse_rational(s));
  return out;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message, Json extra = Json::object()) {
  Json doc;
  doc["error"] = {{"kind", kind}, {"message", message}};
  for (auto& [k, v] : extra.items()) doc["error"][k] = v;
  err << doc.dump(2) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments with systems of homogeneous forms: zero counts, Weyl sums, pencils and local densities."};
  app.name("weylsys");
  app.set_version_flag("--version", std::string(WEYLSYS_VERSION));
  app.require_subcommand(1);

  Common common;
  Session session(common, err);
  auto add_common = [&](CLI::App* sub, bool needs_system = true) {
    if (needs_system) {
      sub->add_option("--system", common.system_path, "System file (JSON)");
      sub->add_option("--form", common.forms, "Form such as \"x1^2 - x2*x3\"; repeat for several");
      sub->add_option("--vars", common.vars, "Number of variables for --form")->check(CLI::PositiveNumber);
    }
    sub->add_option("--workers", common.workers, "Worker threads")->envname("WEYLSYS_WORKERS")->check(CLI::Range(1u, 256u));
    sub->add_option("--ceiling", common.ceiling, "Feasibility ceiling in elementary operations")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "Random seed");
    sub->add_option("-o,--output", common.output, "Write the result document here instead of stdout");
    sub->add_flag("--envelope", common.envelope, "Attach a timestamp and elapsed time");
  };

  std::map<CLI::App*, std::function<Outcome()>> handlers;
  auto command = [&](const std::string& name, const std::string& help, bool needs_system = true) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, needs_system);
    return sub;
  };

  // count
  std::vector<std::string> count_P;
  std::string count_strategy = "auto";
  {
    auto* sub = command("count", "Integer zeros in the scaled box P*B");
    sub->add_option("--P", count_P, "Scale P; several values give a sweep")->required()->delimiter(',');
    sub->add_option("--strategy", count_strategy, "auto, brute-force or split");
    sub->add_option("--csv", common.csv, "Also write P,rho,main_term,ratio rows here");
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      const auto box = session.box();
      const auto Ps = parse_rationals(count_P);
      o.inputs = {{"system", session.system_json()}, {"P", rationals(Ps)}, {"strategy", count_strategy}};
      const int exponent = sys.num_vars() - sys.num_forms() * sys.degree();
      Json rows = Json::array();
      o.csv_header = {"P", "rho", "main_term", "ratio"};
      for (const auto& P : Ps) {
        if (P <= 0) throw InputError("P must be positive");
        const auto res = count_zeros(sys, box, P, session.budget(), strategy_from(count_strategy));
        const double main = std::pow(P.get_d(), exponent);
        Json row = to_json(res);
        row["main_term"] = json_real(main);
        row["ratio"] = json_real(static_cast<double>(res.count) / main);
        rows.push_back(row);
        o.csv_rows.push_back({P.get_str(), to_string(res.count), fmt(main), fmt(static_cast<double>(res.count) / main)});
      }
      o.outputs = rows.size() == 1 ? rows[0] : Json{{"rows", rows}};
      return o;
    };
  }

  // count-mod
  std::int64_t modulus = 0;
  {
    auto* sub = command("count-mod", "Zeros modulo M");
    sub->add_option("--modulus,-M", modulus, "Modulus M >= 1")->required()->check(CLI::PositiveNumber);
    handlers[sub] = [&] {
      Outcome o;
      o.inputs = {{"system", session.system_json()}, {"modulus", modulus}};
      o.outputs = to_json(count_zeros_mod(session.system(), modulus, session.budget()));
      return o;
    };
  }

  // expsum
  std::vector<std::string> alpha_in;
  std::string P_in = "1";
  {
    auto* sub = command("expsum", "Weyl sum S(alpha) over P*B");
    sub->add_option("--alpha", alpha_in, "Weights; one value is used for every form. Prefix ~ for floating point")
        ->required()
        ->delimiter(',');
    sub->add_option("--P", P_in, "Scale P")->required();
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      const auto alpha = alpha_for(alpha_in, sys.num_forms());
      const Rational P = parse_rational(P_in);
      o.inputs = {{"system", session.system_json()}, {"alpha", alpha.to_strings()}, {"P", json_rational(P)}};
      o.outputs = to_json(weyl_sum(sys, alpha, session.box(), P, session.budget()));
      return o;
    };
  }

  // dichotomy
  std::string theta_in = "1/2";
  DichotomyOptions dopts;
  std::optional<double> k_in;
  {
    auto* sub = command("dichotomy", "Weyl sum, small-fractional-part tuples and the three alternatives");
    sub->add_option("--alpha", alpha_in, "Weights; one value is used for every form")->required()->delimiter(',');
    sub->add_option("--P", P_in, "Scale P")->required();
    sub->add_option("--theta", theta_in, "Exponent theta in (0, 1]");
    sub->add_option("--C1", dopts.calibration.C1, "Constant for alternative (i)");
    sub->add_option("--C2", dopts.calibration.C2, "Constant for alternative (ii)");
    sub->add_option("--C3", dopts.calibration.C3, "Constant for alternative (iii)");
    sub->add_option("--epsilon", dopts.epsilon, "Small exponent loss")->check(CLI::NonNegativeNumber);
    sub->add_option("--k", k_in, "Exponent k of alternative (i)");
    sub->add_option("--row-cap", dopts.row_cap, "Maximum rows kept for the rank computation");
    sub->add_option("--pencil-height", dopts.pencil_height, "Height of the pencil rank search used for the default k");
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      const auto alpha = alpha_for(alpha_in, sys.num_forms());
      const Rational P = parse_rational(P_in);
      const Rational theta = parse_rational(theta_in);
      dopts.k = k_in;
      o.inputs = {{"system", session.system_json()},
                  {"alpha", alpha.to_strings()},
                  {"P", json_rational(P)},
                  {"theta", json_rational(theta)},
                  {"calibration", {{"C1", dopts.calibration.C1}, {"C2", dopts.calibration.C2}, {"C3", dopts.calibration.C3}}},
                  {"epsilon", dopts.epsilon},
                  {"k", k_in ? Json(*k_in) : Json(nullptr)},
                  {"row_cap", dopts.row_cap},
                  {"pencil_height", dopts.pencil_height}};
      o.outputs = to_json(dichotomy_experiment(sys, alpha, theta, P, session.box(), dopts, session.budget()));
      return o;
    };
  }

  // pencil-rank
  int height = 3;
  {
    auto* sub = command("pencil-rank", "Minimum rank over a quadratic pencil");
    sub->add_option("--height", height, "Search height for pencil vectors")->check(CLI::PositiveNumber);
    handlers[sub] = [&] {
      Outcome o;
      o.inputs = {{"system", session.system_json()}, {"height", height}};
      o.outputs = to_json(min_pencil_rank_search(session.system(), height, common.seed, session.budget()));
      return o;
    };
  }

  // discriminant
  {
    auto* sub = command("discriminant", "det(a1 G1 + a2 G2) for a pair of quadratic forms");
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      if (sys.num_forms() != 2 || sys.degree() != 2) throw InputError("discriminant needs two quadratic forms");
      o.inputs = {{"system", session.system_json()}};
      o.outputs = to_json(discriminant_binary_form(sys[0], sys[1]));
      return o;
    };
  }

  // rational-roots
  std::vector<std::string> coeffs_in;
  {
    auto* sub = command("rational-roots", "Rational projective zeros of a binary form (default: the discriminant)");
    sub->add_option("--coeffs", coeffs_in, "Coefficients of a1^n, a1^(n-1) a2, ..., a2^n")->delimiter(',');
    handlers[sub] = [&] {
      Outcome o;
      BinaryForm form;
      if (!coeffs_in.empty()) {
        if (!common.system_path.empty() || !common.forms.empty()) throw InputError("use either --coeffs or a system");
        for (const auto& c : coeffs_in) {
          Integer v;
          if (v.set_str(c, 10) != 0) throw InputError("bad integer coefficient '" + c + "'");
          form.coeffs.push_back(v);
        }
        o.inputs = {{"coefficients", coeffs_in}};
      } else {
        const auto sys = session.system();
        if (sys.num_forms() != 2 || sys.degree() != 2) throw InputError("rational-roots needs --coeffs or two quadratic forms");
        form = discriminant_binary_form(sys[0], sys[1]).form;
        o.inputs = {{"system", session.system_json()}};
      }
      if (form.is_zero()) throw InputError("the binary form is identically zero");
      Json roots = Json::array();
      for (const auto& [a1, a2] : rational_roots(form)) roots.push_back({a1.get_str(), a2.get_str()});
      o.outputs = {{"form", to_json(form)}, {"roots", roots}, {"num_roots", roots.size()}};
      return o;
    };
  }

  // hinv
  int form_index = 1;
  std::int64_t h_diag = 8;
  {
    auto* sub = command("hinv", "Bounds on the h-invariant of a cubic form");
    sub->add_option("--index", form_index, "Which form of the system (1-based)")->check(CLI::PositiveNumber);
    sub->add_option("--H", h_diag, "Largest height for the bilinear zero counts")->check(CLI::PositiveNumber);
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      if (form_index > sys.num_forms()) throw InputError("--index exceeds the number of forms");
      o.inputs = {{"system", session.system_json()}, {"index", form_index}, {"H", h_diag}};
      o.outputs = to_json(h_invariant_bounds(sys[static_cast<std::size_t>(form_index - 1)], h_diag, session.budget()));
      return o;
    };
  }

  // vstar-dim
  std::vector<std::int64_t> primes{5, 7, 11};
  std::vector<std::int64_t> pencil_in;
  {
    auto* sub = command("vstar-dim", "Dimension of the singular locus of a pencil member from counts mod p");
    sub->add_option("--primes", primes, "Primes")->delimiter(',');
    sub->add_option("--a", pencil_in, "Pencil vector (default: the first form)")->delimiter(',');
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      IntVector a = pencil_in;
      if (a.empty()) {
        a.assign(static_cast<std::size_t>(sys.num_forms()), 0);
        a[0] = 1;
      }
      if (static_cast<int>(a.size()) != sys.num_forms()) throw InputError("--a needs r entries");
      const PencilVector pv(a);
      o.inputs = {{"system", session.system_json()}, {"primes", primes}, {"a", a}};
      const Form member = pencil_combine(sys, pv);
      Json res = to_json(vstar_dim_estimate(member, primes, session.budget()));
      if (member.degree() == 2) res["s_minus_rank"] = member.num_vars() - static_cast<int>(rank_quadratic(member));
      o.outputs = res;
      return o;
    };
  }

  // singular-series
  std::int64_t p_max = 50;
  int k_max = 3;
  {
    auto* sub = command("singular-series", "Truncated product of local densities");
    sub->add_option("--p-max", p_max, "Largest prime")->check(CLI::Range(std::int64_t{2}, std::int64_t{100000}));
    sub->add_option("--k-max", k_max, "Largest prime-power exponent")->check(CLI::Range(1, 64));
    handlers[sub] = [&] {
      Outcome o;
      o.inputs = {{"system", session.system_json()}, {"p_max", p_max}, {"k_max", k_max}};
      o.outputs = to_json(singular_series(session.system(), p_max, k_max, session.budget()));
      return o;
    };
  }

  // singular-integral
  MonteCarloParams mc;
  {
    auto* sub = command("singular-integral", "Monte Carlo slab volumes for the real density");
    sub->add_option("--epsilons", mc.epsilons, "Strictly decreasing slab half-widths")->delimiter(',');
    sub->add_option("--samples", mc.samples, "Sample count (at least 10^4)");
    handlers[sub] = [&] {
      Outcome o;
      o.inputs = {{"system", session.system_json()}, {"epsilons", mc.epsilons}, {"samples", mc.samples}, {"seed", common.seed}};
      session.progress("sampling " + std::to_string(mc.samples) + " points");
      o.outputs = to_json(singular_integral(session.system(), session.box(), mc.epsilons, mc.samples, common.seed, session.budget()));
      return o;
    };
  }

  // asymptotic
  std::vector<std::string> sweep_P{"10", "20", "40", "80"};
  double tolerance = 0.15;
  {
    auto* sub = command("asymptotic", "Compare rho(P) with the predicted main term");
    sub->add_option("--P", sweep_P, "Scales")->delimiter(',');
    sub->add_option("--p-max", p_max, "Largest prime in the series")->check(CLI::Range(std::int64_t{2}, std::int64_t{100000}));
    sub->add_option("--k-max", k_max, "Largest prime-power exponent")->check(CLI::Range(1, 64));
    sub->add_option("--epsilons", mc.epsilons, "Slab half-widths")->delimiter(',');
    sub->add_option("--samples", mc.samples, "Monte Carlo samples");
    sub->add_option("--tolerance", tolerance, "Relative deviation accepted at the largest P")->check(CLI::PositiveNumber);
    sub->add_option("--csv", common.csv, "Also write P,rho,main_term,ratio rows here");
    handlers[sub] = [&] {
      Outcome o;
      const auto Ps = parse_rationals(sweep_P);
      mc.seed = common.seed;
      o.inputs = {{"system", session.system_json()},
                  {"P", rationals(Ps)},
                  {"p_max", p_max},
                  {"k_max", k_max},
                  {"epsilons", mc.epsilons},
                  {"samples", mc.samples},
                  {"seed", common.seed},
                  {"tolerance", tolerance}};
      session.progress("asymptotic: series, integral and " + std::to_string(Ps.size()) + " counts");
      const auto rep = asymptotic_report(session.system(), session.box(), Ps, p_max, k_max, mc, tolerance, session.budget());
      o.outputs = to_json(rep);
      o.csv_header = {"P", "rho", "main_term", "ratio"};
      for (const auto& row : rep.rows)
        o.csv_rows.push_back({row.P.get_str(), to_string(row.rho), fmt(row.main_power), fmt(row.ratio)});
      return o;
    };
  }

  // constants
  std::optional<std::string> max_dim_in;
  std::optional<int> invariant_in;
  {
    auto* sub = command("constants", "K, m and the rank and dimension hypotheses for a system");
    sub->add_option("--max-dim", max_dim_in, "Largest dimension of the singular loci (required for d >= 3)");
    sub->add_option("--invariant", invariant_in, "Known lower bound for the pencil invariant");
    sub->add_option("--height", height, "Pencil search height (quadratics)")->check(CLI::PositiveNumber);
    handlers[sub] = [&] {
      Outcome o;
      const auto sys = session.system();
      o.inputs = {{"system", session.system_json()},
                  {"max_dim", max_dim_in ? Json(*max_dim_in) : Json(nullptr)},
                  {"invariant", invariant_in ? Json(*invariant_in) : Json(nullptr)},
                  {"height", height}};
      if (sys.degree() == 2 && !max_dim_in) {
        const auto report = min_pencil_rank_search(sys, height, common.seed, session.budget());
        auto c = dichotomy_constants(sys, report);
        if (invariant_in) c = dichotomy_constants(c.s, c.r, c.d, c.max_vstar_dim, *invariant_in);
        o.outputs = to_json(c);
        o.outputs["pencil_rank"] = to_json(report);
      } else {
        if (!max_dim_in) throw InputError("--max-dim is required for d >= 3");
        o.outputs = to_json(dichotomy_constants(sys.num_vars(), sys.num_forms(), sys.degree(),
                                                parse_rational(*max_dim_in), invariant_in));
      }
      return o;
    };
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << WEYLSYS_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what());
    return 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto started = std::chrono::steady_clock::now();
  try {
    Outcome o = handlers.at(chosen)();
    Json doc;
    doc["command"] = chosen->get_name();
    doc["inputs"] = std::move(o.inputs);
    doc["outputs"] = std::move(o.outputs);
    doc["provenance"] = {{"seed", common.seed}, {"workers", common.workers}, {"version", WEYLSYS_VERSION}};
    if (common.envelope) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      doc["envelope"] = {{"timestamp", timestamp()}, {"elapsed_seconds", elapsed}};
    }
    const std::string text = doc.dump(2) + "\n";
    if (common.output.empty()) {
      out << text;
    } else {
      std::ofstream file(common.output);
      if (!file) throw InputError("cannot write '" + common.output + "'");
      file << text;
    }
    if (!common.csv.empty()) {
      std::ofstream file(common.csv);
      if (!file) throw InputError("cannot write '" + common.csv + "'");
      for (std::size_t i = 0; i < o.csv_header.size(); ++i) file << (i ? "," : "") << o.csv_header[i];
      file << '\n';
      for (const auto& row : o.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) file << (i ? "," : "") << row[i];
        file << '\n';
      }
    }
    return 0;
  } catch (const FeasibilityError& e) {
    write_error(err, "feasibility", e.what(), {{"estimated_cost", e.estimated_cost()}, {"ceiling", e.ceiling()}});
    return 2;
  } catch (const ParseError& e) {
    write_error(err, "input", e.what(), {{"position", e.position()}});
    return 1;
  } catch (const InputError& e) {
    write_error(err, "input", e.what());
    return 1;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace weylsys
