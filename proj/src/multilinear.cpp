#include "weylsys/multilinear.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "detail/parallel.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/poly_system.hpp"

namespace weylsys {
namespace {

using Clock = std::chrono::steady_clock;

Form restrict_form(const Form& form, std::span<const int> vars) {
  std::vector<int> local(static_cast<std::size_t>(form.num_vars()), -1);
  for (std::size_t k = 0; k < vars.size(); ++k) local[static_cast<std::size_t>(vars[k])] = static_cast<int>(k);
  std::vector<Monomial> kept;
  for (const auto& m : form.monomials()) {
    Monomial lm{{}, m.coefficient};
    bool inside = true;
    for (int idx : m.indices) {
      if (local[static_cast<std::size_t>(idx)] < 0) {
        inside = false;
        break;
      }
      lm.indices.push_back(local[static_cast<std::size_t>(idx)]);
    }
    if (inside) kept.push_back(std::move(lm));
  }
  return Form::from_monomials(std::move(kept), static_cast<int>(vars.size()), form.degree());
}

std::vector<IntVector> check_tuple(const Form& form, std::span<const IntVector> tuple) {
  if (static_cast<int>(tuple.size()) != form.degree() - 1) throw InputError("tuple must hold d-1 vectors");
  for (const auto& v : tuple)
    if (static_cast<int>(v.size()) != form.num_vars()) throw InputError("tuple vector length does not match s");
  return {tuple.begin(), tuple.end()};
}

IntVector flatten(std::span<const IntVector> tuple) {
  IntVector flat;
  for (const auto& v : tuple) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

double max_abs(std::span<const IntRange> ranges) {
  double m = 0;
  for (const auto& r : ranges) m = std::max({m, std::fabs(static_cast<double>(r.lo)), std::fabs(static_cast<double>(r.hi))});
  return m;
}

void require_tensor_range(const PsiTensor& t, double coordinate_bound, double weight = 1.0) {
  if (!(t.magnitude_bound(coordinate_bound) * weight < 1e36)) {
    throw InputError("multilinear values over this box may exceed the 128-bit range");
  }
}

std::vector<IntRange> tuple_ranges(const std::vector<IntRange>& ranges, int arity) {
  std::vector<IntRange> out;
  for (int k = 0; k < arity; ++k) out.insert(out.end(), ranges.begin(), ranges.end());
  return out;
}

u128 mul_count(u128 a, u128 b) {
  u128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw InputError("tuple count exceeds the 128-bit counter range");
  return out;
}

struct BlockPlan {
  std::vector<std::vector<int>> blocks;
  std::string method;
};

BlockPlan plan_blocks(const PolySystem& sys, CountStrategy strategy) {
  BlockPlan plan;
  plan.blocks = sys.variable_blocks();
  if (strategy == CountStrategy::brute_force || plan.blocks.size() < 2) {
    std::vector<int> all(static_cast<std::size_t>(sys.num_vars()));
    std::iota(all.begin(), all.end(), 0);
    plan.blocks = {all};
    plan.method = "brute-force";
  } else {
    plan.method = "block-product";
  }
  return plan;
}

}  // namespace

// ---------------------------------------------------------------------------

Alpha::Alpha(std::vector<double> values) : approx_(std::move(values)) {
  for (double v : approx_)
    if (!std::isfinite(v)) throw InputError("alpha entries must be finite");
}

Alpha::Alpha(RationalVector exact) : exact_(std::move(exact)) {
  for (auto& q : *exact_) {
    q.canonicalize();
    approx_.push_back(q.get_d());
  }
}

Alpha Alpha::parse(const std::vector<std::string>& entries) {
  bool all_exact = true;
  RationalVector exact;
  std::vector<double> approx;
  for (const auto& e : entries) {
    if (!e.empty() && e[0] == '~') {
      all_exact = false;
      try {
        approx.push_back(std::stod(e.substr(1)));
      } catch (const std::exception&) {
        throw InputError("malformed real alpha entry '" + e + "'");
      }
      exact.emplace_back(0);
    } else {
      exact.push_back(parse_rational(e));
      approx.push_back(exact.back().get_d());
    }
  }
  return all_exact ? Alpha(std::move(exact)) : Alpha(std::move(approx));
}

Alpha Alpha::negated() const {
  if (exact_) {
    RationalVector e = *exact_;
    for (auto& q : e) q = -q;
    return Alpha(std::move(e));
  }
  std::vector<double> a = approx_;
  for (auto& v : a) v = -v;
  return Alpha(std::move(a));
}

Alpha Alpha::shifted(std::size_t i, std::int64_t by) const {
  if (exact_) {
    RationalVector e = *exact_;
    e.at(i) += Integer(static_cast<long>(by));
    return Alpha(std::move(e));
  }
  std::vector<double> a = approx_;
  a.at(i) += static_cast<double>(by);
  return Alpha(std::move(a));
}

bool Alpha::is_zero() const {
  if (exact_) return std::all_of(exact_->begin(), exact_->end(), [](const Rational& q) { return q == 0; });
  return std::all_of(approx_.begin(), approx_.end(), [](double v) { return v == 0.0; });
}

std::vector<std::string> Alpha::to_strings() const {
  std::vector<std::string> out;
  if (exact_) {
    for (const auto& q : *exact_) out.push_back(q.get_str());
  } else {
    for (double v : approx_) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "~%.17g", v);
      out.emplace_back(buf);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

PsiTensor::PsiTensor(const Form& form) : num_vars_(form.num_vars()), arity_(form.degree() - 1) {
  std::vector<std::vector<std::pair<std::vector<int>, std::int64_t>>> per_j(static_cast<std::size_t>(num_vars_));
  for (const auto& m : form.monomials()) {
    const std::int64_t value = Form::scaled_entry(m, form.degree());
    const auto& idx = m.indices;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i > 0 && idx[i] == idx[i - 1]) continue;
      std::vector<int> rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      do {
        per_j[static_cast<std::size_t>(idx[i])].emplace_back(rest, value);
      } while (std::next_permutation(rest.begin(), rest.end()));
    }
  }
  offsets_.push_back(0);
  for (const auto& entries : per_j) {
    for (const auto& [rest, value] : entries) {
      values_.push_back(value);
      indices_.insert(indices_.end(), rest.begin(), rest.end());
    }
    offsets_.push_back(values_.size());
  }
}

i128 PsiTensor::eval(int j, std::span<const std::int64_t> tuple) const {
  i128 total = 0;
  const std::size_t s = static_cast<std::size_t>(num_vars_);
  for (std::size_t e = offsets_[static_cast<std::size_t>(j)]; e < offsets_[static_cast<std::size_t>(j) + 1]; ++e) {
    i128 term = values_[e];
    const int* idx = &indices_[e * static_cast<std::size_t>(arity_)];
    for (int k = 0; k < arity_; ++k) term *= tuple[static_cast<std::size_t>(k) * s + static_cast<std::size_t>(idx[k])];
    total += term;
  }
  return total;
}

double PsiTensor::magnitude_bound(double bound) const {
  double worst = 0;
  for (std::size_t j = 0; j + 1 < offsets_.size(); ++j) {
    double total = 0;
    for (std::size_t e = offsets_[j]; e < offsets_[j + 1]; ++e) total += std::fabs(static_cast<double>(values_[e]));
    worst = std::max(worst, total * std::pow(bound, arity_));
  }
  return worst;
}

Integer psi(const Form& form, int j, std::span<const IntVector> tuple) {
  if (j < 0 || j >= form.num_vars()) throw InputError("psi index j out of range");
  const auto checked = check_tuple(form, tuple);
  const PsiTensor t(form);
  double bound = 0;
  for (const auto& v : checked)
    for (auto x : v) bound = std::max(bound, std::fabs(static_cast<double>(x)));
  require_tensor_range(t, bound);
  return to_integer(t.eval(j, flatten(checked)));
}

Integer phi(const FormSystem& system, std::span<const std::int64_t> weights, int j, std::span<const IntVector> tuple) {
  if (static_cast<int>(weights.size()) != system.num_forms()) throw InputError("weight vector length does not match r");
  Integer total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0) total += psi(system[i], j, tuple) * static_cast<long>(weights[i]);
  return total;
}

Rational phi(const FormSystem& system, std::span<const Rational> weights, int j, std::span<const IntVector> tuple) {
  if (static_cast<int>(weights.size()) != system.num_forms()) throw InputError("weight vector length does not match r");
  Rational total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0) total += weights[i] * psi(system[i], j, tuple);
  return total;
}

double phi(const FormSystem& system, std::span<const double> weights, int j, std::span<const IntVector> tuple) {
  if (static_cast<int>(weights.size()) != system.num_forms()) throw InputError("weight vector length does not match r");
  long double total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    total += static_cast<long double>(weights[i]) * psi(system[i], j, tuple).get_d();
  return static_cast<double>(total);
}

void CountWindow::validate() const {
  if (!(Q > 0 && Q <= 1)) throw InputError("Q must lie in (0, 1]");
  if (!(theta > 0 && theta <= 1)) throw InputError("theta must lie in (0, 1]");
  if (H < 1) throw InputError("H must be at least 1");
  if (scale <= 0) throw InputError("P must be positive");
}

// ---------------------------------------------------------------------------

NCountResult count_N(const FormSystem& system, const Alpha& alpha, const LatticeBox& box, const CountWindow& window,
                     const Budget& budget, double guard_band, const PsiRowSink& rows, CountStrategy strategy) {
  window.validate();
  const int r = system.num_forms();
  const int arity = system.degree() - 1;
  if (static_cast<int>(alpha.size()) != r) throw InputError("alpha length does not match r");
  if (box.dim() != system.num_vars()) throw InputError("box dimension does not match variable count");
  const auto ranges = box.scaled_ranges(window.scale);

  // Exact phases: L * Phi_j is the Psi_j of an integer pencil form.
  std::optional<Form> combined;
  std::int64_t common_den = 1;
  if (alpha.exact()) {
    Integer L = 1;
    for (const auto& q : *alpha.exact()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den().get_mpz_t());
    if (L.fits_slong_p()) {
      IntVector w;
      bool fits = true;
      for (const auto& q : *alpha.exact()) {
        const Integer wi = q.get_num() * (L / q.get_den());
        if (!wi.fits_slong_p()) fits = false;
        w.push_back(fits ? wi.get_si() : 0);
      }
      if (fits) {
        try {
          combined = pencil_combine(system, w);
          common_den = L.get_si();
        } catch (const InputError&) {
          combined.reset();
        }
      }
    }
  }

  const auto plan = plan_blocks(PolySystem::from_forms(system), strategy);
  NCountResult result;
  result.guard_band = guard_band;
  result.exact_phases = combined.has_value();
  result.method = plan.method;
  double cost = 0;
  for (const auto& b : plan.blocks) {
    std::vector<IntRange> local;
    for (int v : b) local.push_back(ranges[static_cast<std::size_t>(v)]);
    cost += LatticePoints(tuple_ranges(local, arity)).count_estimate() * static_cast<double>(b.size());
  }
  result.cost = cost;
  budget.require(cost, "N(P; Q; alpha) enumeration");

  const long double Q = window.Q;
  const long double QL = Q * static_cast<long double>(common_den);
  Integer total = 1;
  bool want_rows = static_cast<bool>(rows);
  for (const auto& b : plan.blocks) {
    std::vector<IntRange> local;
    for (int v : b) local.push_back(ranges[static_cast<std::size_t>(v)]);
    const int s_local = static_cast<int>(b.size());
    const double coord = max_abs(local);
    std::vector<PsiTensor> per_form;
    for (const auto& f : system.forms()) {
      per_form.emplace_back(restrict_form(f, b));
      require_tensor_range(per_form.back(), coord);
    }
    std::optional<PsiTensor> comb;
    if (combined) {
      comb.emplace(restrict_form(*combined, b));
      require_tensor_range(*comb, coord);
    }
    const LatticePoints tuples(tuple_ranges(local, arity));
    const unsigned workers = want_rows ? 1 : budget.workers;
    const auto parts = tuples.partition(detail::chunk_count(workers));
    struct Partial {
      u128 count = 0;
      std::uint64_t near = 0;
    };
    const auto partials = detail::run_partitioned<Partial>(parts.size(), workers, [&](std::size_t p) {
      Partial acc;
      std::vector<i128> row(static_cast<std::size_t>(r));
      for (const auto& t : parts[p]) {
        bool counted = true;
        std::uint64_t near = 0;
        for (int j = 0; j < s_local && counted; ++j) {
          if (comb) {
            const std::int64_t m = mod_floor(comb->eval(j, t), common_den);
            const std::int64_t dist = std::min(m, common_den - m);
            counted = static_cast<long double>(dist) < QL;
          } else {
            long double value = 0;
            for (int i = 0; i < r; ++i)
              value += static_cast<long double>(alpha.approx()[static_cast<std::size_t>(i)]) *
                       static_cast<long double>(per_form[static_cast<std::size_t>(i)].eval(j, t));
            const long double dist = std::fabs(value - std::nearbyint(value));
            if (std::fabs(dist - Q) <= guard_band) ++near;
            counted = dist < Q;
          }
        }
        acc.near += near;
        if (!counted) continue;
        ++acc.count;
        if (want_rows) {
          for (int j = 0; j < s_local && want_rows; ++j) {
            bool nonzero = false;
            for (int i = 0; i < r; ++i) {
              row[static_cast<std::size_t>(i)] = per_form[static_cast<std::size_t>(i)].eval(j, t);
              nonzero = nonzero || row[static_cast<std::size_t>(i)] != 0;
            }
            if (nonzero) want_rows = rows(row);
          }
        }
      }
      return acc;
    });
    u128 block_count = 0;
    for (const auto& p : partials) {
      block_count += p.count;
      result.near_threshold += p.near;
    }
    total *= to_integer(block_count);
  }
  result.count = total;
  return result;
}

CountResult count_multilinear_zeros(const Form& form, const Rational& H, const LatticeBox& box, const Budget& budget,
                                    CountStrategy strategy) {
  const auto start = Clock::now();
  if (H < 1) throw InputError("H must be at least 1");
  if (box.dim() != form.num_vars()) throw InputError("box dimension does not match variable count");
  const int arity = form.degree() - 1;
  const auto ranges = box.scaled_ranges(H);
  const auto plan = plan_blocks(PolySystem::from_form(form), strategy);

  CountResult result;
  result.scale = H;
  result.method = plan.method;
  struct Job {
    std::vector<IntRange> local;
    std::optional<PsiTensor> tensor;
  };
  std::vector<Job> jobs;
  for (const auto& b : plan.blocks) {
    Job job;
    for (int v : b) job.local.push_back(ranges[static_cast<std::size_t>(v)]);
    const Form local_form = restrict_form(form, b);
    if (!local_form.is_zero()) {
      job.tensor.emplace(local_form);
      require_tensor_range(*job.tensor, max_abs(job.local));
      result.cost += LatticePoints(tuple_ranges(job.local, arity)).count_estimate() * static_cast<double>(b.size());
    }
    jobs.push_back(std::move(job));
  }
  budget.require(result.cost, "M(a; H) enumeration");

  u128 total = 1;
  for (const auto& job : jobs) {
    const LatticePoints tuples(tuple_ranges(job.local, arity));
    if (!job.tensor) {
      // Psi vanishes identically on this block: every tuple counts.
      total = mul_count(total, static_cast<u128>(tuples.count()));
      continue;
    }
    const int s_local = static_cast<int>(job.local.size());
    const auto parts = tuples.partition(detail::chunk_count(budget.workers));
    const auto counts = detail::run_partitioned<u128>(parts.size(), budget.workers, [&](std::size_t p) {
      u128 count = 0;
      for (const auto& t : parts[p]) {
        bool zero = true;
        for (int j = 0; j < s_local && zero; ++j) zero = job.tensor->eval(j, t) == 0;
        if (zero) ++count;
      }
      return count;
    });
    total = mul_count(total, std::accumulate(counts.begin(), counts.end(), u128{0}));
  }
  result.count = total;
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

CountResult count_M(const FormSystem& system, const PencilVector& a, const Rational& H, const LatticeBox& box,
                    const Budget& budget, CountStrategy strategy) {
  return count_multilinear_zeros(pencil_combine(system, a), H, box, budget, strategy);
}

}  // namespace weylsys
