#include "weylsys/json_io.hpp"

#include <cmath>
#include <limits>

namespace weylsys {
namespace {

Json integers(const std::vector<Integer>& v) {
  Json out = Json::array();
  for (const auto& x : v) {
    if (x.fits_slong_p())
      out.push_back(x.get_si());
    else
      out.push_back(x.get_str());
  }
  return out;
}

Json json_integer(const Integer& x) { return x.fits_slong_p() ? Json(x.get_si()) : Json(x.get_str()); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json json_count(u128 v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
  return to_string(v);
}

Json json_count(const Integer& v) {
  if (v.fits_ulong_p()) return static_cast<std::uint64_t>(v.get_ui());
  return v.get_str();
}

Json json_rational(const Rational& q) { return q.get_str(); }

Json json_real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const CountResult& r) {
  return {{"count", json_count(r.count)}, {"scale", json_rational(r.scale)}, {"method", r.method}, {"cost", r.cost}};
}

Json to_json(const NCountResult& r) {
  return {{"count", json_count(r.count)},
          {"near_threshold", r.near_threshold},
          {"guard_band", r.guard_band},
          {"exact_phases", r.exact_phases},
          {"method", r.method},
          {"cost", r.cost}};
}

Json to_json(const WeylSumResult& r) {
  return {{"value", {json_real(r.value.real()), json_real(r.value.imag())}},
          {"modulus", json_real(std::abs(r.value))},
          {"num_points", json_count(r.num_points)},
          {"normalized_modulus", json_real(r.normalized_modulus)},
          {"exact_phases", r.exact_phases},
          {"partitions", r.partitions},
          {"method", r.method}};
}

Json to_json(const RationalApprox& r) { return {{"q", r.q}, {"a", r.a}, {"max_error", json_real(r.max_error)}}; }

Json to_json(const DichotomyReport& r) {
  Json cert = nullptr;
  if (r.certificate) {
    cert = {{"q", json_integer(r.certificate->q)},
            {"a", integers(r.certificate->a)},
            {"max_error", json_real(r.certificate->max_error)},
            {"exact_error", r.certificate->exact_error ? json_rational(*r.certificate->exact_error) : Json(nullptr)}};
  }
  Json out;
  out["alpha"] = r.alpha;
  out["theta"] = json_rational(r.theta);
  out["P"] = json_rational(r.P);
  out["P_theta"] = json_real(r.P_theta);
  out["Q"] = json_real(r.Q);
  out["k"] = json_real(r.k);
  out["k_source"] = r.k_source;
  out["epsilon"] = r.epsilon;
  out["weyl_sum"] = to_json(r.weyl);
  out["k_measured"] = r.k_measured ? json_real(*r.k_measured) : Json(nullptr);
  out["n_count"] = json_count(r.n_count);
  out["near_threshold"] = r.near_threshold;
  out["rows_collected"] = r.rows_collected;
  out["psi_matrix_rank"] = r.psi_matrix_rank;
  out["psi_case"] = r.psi_case;
  out["certificate"] = cert;
  out["search_certificate"] = r.search_certificate ? to_json(*r.search_certificate) : Json(nullptr);
  out["certificates_agree"] = optional_json(r.certificates_agree);
  out["q_window"] = json_real(r.q_window);
  out["approx_window"] = json_real(r.approx_window);
  out["kernel_vector"] = optional_json(r.kernel_vector);
  out["kernel_count_M"] = r.kernel_count_M ? json_count(*r.kernel_count_M) : Json(nullptr);
  out["kernel_bound"] = json_real(r.kernel_bound);
  out["bound_i"] = json_real(r.bound_i);
  out["holds_i"] = r.holds_i;
  out["holds_ii"] = r.holds_ii;
  out["holds_iii"] = optional_json(r.holds_iii);
  return out;
}

Json to_json(const BinaryForm& f) {
  return {{"degree", f.degree()}, {"coefficients", integers(f.coeffs)}, {"text", f.to_string()}};
}

Json to_json(const DiscriminantResult& r) {
  return {{"form", to_json(r.form)}, {"scaling", json_integer(r.scaling)}};
}

Json to_json(const PencilRankReport& r) {
  Json roots = Json::array();
  for (const auto& [a, rank] : r.root_members) roots.push_back({{"a", a}, {"rank", rank}});
  Json out;
  out["generic_rank"] = r.generic_rank;
  out["min_rank_found"] = r.min_rank_found;
  out["witness"] = r.witness;
  out["search_height"] = r.search_height;
  out["members_checked"] = r.members_checked;
  out["certified"] = r.certified;
  out["discriminant"] = r.discriminant ? to_json(*r.discriminant) : Json(nullptr);
  out["root_members"] = roots;
  return out;
}

Json to_json(const VStarEstimate& r) {
  Json per = Json::array();
  for (const auto& c : r.per_prime)
    per.push_back({{"p", c.p}, {"count", json_count(c.count)}, {"log_p_count", json_real(c.log_p_count)}, {"bad", c.bad}});
  return {{"estimate", json_real(r.estimate)}, {"per_prime", per}, {"bad_primes", r.bad_primes}};
}

Json to_json(const HInvariantBounds& r) {
  Json terms = Json::array();
  for (const auto& t : r.decomposition) {
    Json lin = Json::array();
    for (const auto& c : t.linear) lin.push_back(json_rational(c));
    Json quad = Json::array();
    for (const auto& [i, j, c] : t.quadratic) quad.push_back({i, j, json_rational(c)});
    terms.push_back({{"linear", lin}, {"quadratic", quad}});
  }
  Json diag = Json::array();
  for (const auto& [H, count, value] : r.diagnostics)
    diag.push_back({{"H", H}, {"count", json_count(count)}, {"value", json_real(value)}});
  return {{"lower", r.lower},
          {"upper", r.upper},
          {"lower_is_heuristic", r.lower_is_heuristic},
          {"decomposition", terms},
          {"decomposition_verified", r.decomposition_verified},
          {"singular_dim", r.singular_dim ? json_real(*r.singular_dim) : Json(nullptr)},
          {"diagnostics", diag}};
}

Json to_json(const DichotomyConstants& c) {
  Json out;
  out["s"] = c.s;
  out["r"] = c.r;
  out["d"] = c.d;
  out["max_vstar_dim"] = json_rational(c.max_vstar_dim);
  out["K"] = json_rational(c.K);
  out["phi_d"] = json_integer(c.phi_d);
  out["phi_is_bound"] = c.phi_is_bound;
  out["delta_cap"] = c.delta_cap;
  out["m"] = json_integer(c.m);
  out["dimension_hypothesis"] = c.dimension_hypothesis;
  out["pencil_invariant"] = optional_json(c.pencil_invariant);
  out["invariant_hypothesis"] = optional_json(c.invariant_hypothesis);
  return out;
}

Json to_json(const GrowthFit& g) {
  Json counts = Json::array();
  for (const auto& [H, c] : g.counts) counts.push_back({{"H", H}, {"M", json_count(c)}});
  return {{"slope", json_real(g.slope)}, {"counts", counts}};
}

Json to_json(const SingularSeriesEstimate& r) {
  Json factors = Json::array();
  for (const auto& f : r.factors) {
    Json counts = Json::array();
    for (auto c : f.counts) counts.push_back(json_count(c));
    Json chi = Json::array(), chi_approx = Json::array();
    for (const auto& c : f.chi) {
      chi.push_back(json_rational(c));
      chi_approx.push_back(json_real(c.get_d()));
    }
    factors.push_back({{"p", f.p},
                       {"counts", counts},
                       {"chi", chi},
                       {"chi_approx", chi_approx},
                       {"stabilized", f.stabilized},
                       {"obstructed", f.obstructed},
                       {"truncated", f.truncated},
                       {"value", json_real(f.value)}});
  }
  return {{"p_max", r.p_max},
          {"k_max", r.k_max},
          {"factors", factors},
          {"product", json_real(r.product)},
          {"unstable_primes", r.unstable_primes},
          {"obstructed_primes", r.obstructed_primes},
          {"skipped_primes", r.skipped_primes}};
}

Json to_json(const SingularIntegralEstimate& r) {
  Json est = Json::array(), sig = Json::array();
  for (double v : r.estimates) est.push_back(json_real(v));
  for (double v : r.sigmas) sig.push_back(json_real(v));
  return {{"epsilons", r.epsilons},
          {"estimates", est},
          {"sigmas", sig},
          {"hits", r.hits},
          {"samples", r.samples},
          {"seed", r.seed},
          {"extrapolated", json_real(r.extrapolated)},
          {"band", json_real(r.band)},
          {"converged", r.converged}};
}

Json to_json(const AsymptoticReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"P", json_rational(row.P)},
                    {"rho", json_count(row.rho)},
                    {"main_term", json_real(row.main_power)},
                    {"ratio", json_real(row.ratio)},
                    {"predicted", json_real(row.predicted)},
                    {"relative_deviation", json_real(row.relative_deviation)}});
  Json out;
  out["rows"] = rows;
  out["singular_series"] = to_json(r.series);
  out["singular_integral"] = to_json(r.integral);
  out["tolerance"] = r.tolerance;
  out["monotone"] = r.monotone;
  out["empirical_delta"] = r.empirical_delta ? json_real(*r.empirical_delta) : Json(nullptr);
  out["verdict"] = r.verdict;
  return out;
}

}  // namespace weylsys
