#include "weylsys/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "detail/histogram.hpp"
#include "detail/parallel.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/factor.hpp"

namespace weylsys {
namespace {

using detail::ValueHistogram;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Exact integers, or residues modulo `modulus` when it is nonzero.
struct ValueRing {
  std::int64_t modulus = 0;

  i128 reduce(i128 v) const { return modulus ? static_cast<i128>(mod_floor(v, modulus)) : v; }
  i128 add(i128 a, i128 b) const { return modulus ? (a + b) % modulus : a + b; }
  i128 negate(i128 v) const { return modulus ? (v == 0 ? 0 : modulus - v) : -v; }
};

i128 evaluate(const PolySystem& sys, int i, std::span<const std::int64_t> x, const ValueRing& ring) {
  return ring.modulus ? static_cast<i128>(sys.eval_mod(i, x, ring.modulus)) : sys.eval(i, x);
}

void require_count_range(std::span<const IntRange> ranges) {
  double log2_points = 0;
  for (const auto& r : ranges) log2_points += std::log2(std::max<double>(1.0, static_cast<double>(r.size())));
  if (log2_points > 126) throw InputError("point count exceeds the 128-bit counter range");
}

u128 brute_force_count(const PolySystem& sys, const std::vector<IntRange>& ranges, const ValueRing& ring,
                       const Budget& budget) {
  const auto parts = LatticePoints(ranges).partition(detail::chunk_count(budget.workers));
  const auto counts = detail::run_partitioned<u128>(parts.size(), budget.workers, [&](std::size_t p) {
    u128 count = 0;
    for (const auto& x : parts[p]) {
      bool zero = true;
      // Early exit on the first nonvanishing form.
      for (int i = 0; i < sys.size() && zero; ++i) zero = ring.reduce(evaluate(sys, i, x, ring)) == 0;
      if (zero) ++count;
    }
    return count;
  });
  return std::accumulate(counts.begin(), counts.end(), u128{0});
}

ValueHistogram block_histogram(const PolySystem& local, const std::vector<IntRange>& ranges, const ValueRing& ring,
                               const Budget& budget) {
  const int width = local.size();
  const auto parts = LatticePoints(ranges).partition(detail::chunk_count(budget.workers));
  auto partials = detail::run_partitioned<ValueHistogram>(parts.size(), budget.workers, [&](std::size_t p) {
    ValueHistogram h(width);
    std::vector<i128> key(static_cast<std::size_t>(width));
    for (const auto& x : parts[p]) {
      for (int i = 0; i < width; ++i) key[static_cast<std::size_t>(i)] = ring.reduce(evaluate(local, i, x, ring));
      h.add(key.data(), 1);
    }
    return h;
  });
  if (partials.empty()) return ValueHistogram(width);
  ValueHistogram out = std::move(partials.front());
  for (std::size_t p = 1; p < partials.size(); ++p) out.merge(partials[p]);
  return out;
}

ValueHistogram convolve(const ValueHistogram& a, const ValueHistogram& b, const ValueRing& ring) {
  const int width = a.width();
  ValueHistogram out(width, std::min<std::size_t>(a.size() * b.size(), 1u << 22));
  std::vector<i128> key(static_cast<std::size_t>(width));
  a.for_each([&](const i128* ka, u128 ca) {
    b.for_each([&](const i128* kb, u128 cb) {
      for (int i = 0; i < width; ++i) key[static_cast<std::size_t>(i)] = ring.add(ka[i], kb[i]);
      out.add(key.data(), ca * cb);
    });
  });
  return out;
}

struct Block {
  std::vector<int> vars;
  std::vector<IntRange> ranges;
  double points = 1;
};

struct SplitPlan {
  std::vector<Block> group_a;
  std::vector<Block> group_b;
  double cost = 0;
};

// Histograms larger than this are refused rather than allowed to exhaust memory.
constexpr double kHistogramBytes = 1024.0 * 1024.0 * 1024.0;

double group_cost(const std::vector<Block>& group, double cap, double& peak) {
  double cost = 0;
  double acc = 1;
  for (const auto& b : group) {
    cost += b.points;
    const double nnz = std::min(b.points, cap);
    cost += acc * nnz;
    acc = std::min(acc * nnz, cap);
    peak = std::max(peak, acc);
  }
  return cost;
}

SplitPlan plan_split(const PolySystem& sys, const std::vector<IntRange>& ranges, const ValueRing& ring) {
  std::vector<Block> blocks;
  for (auto& vars : sys.variable_blocks()) {
    Block b;
    for (int v : vars) {
      b.ranges.push_back(ranges[static_cast<std::size_t>(v)]);
      b.points *= static_cast<double>(ranges[static_cast<std::size_t>(v)].size());
    }
    b.vars = std::move(vars);
    blocks.push_back(std::move(b));
  }
  // Largest first, each onto the lighter side (in log scale).
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) { return x.points > y.points; });
  SplitPlan plan;
  double log_a = 0;
  double log_b = 0;
  for (auto& b : blocks) {
    const double lg = std::log(std::max(1.0, b.points));
    if (log_a <= log_b) {
      plan.group_a.push_back(std::move(b));
      log_a += lg;
    } else {
      plan.group_b.push_back(std::move(b));
      log_b += lg;
    }
  }
  const double cap = ring.modulus ? std::pow(static_cast<double>(ring.modulus), sys.size())
                                  : std::numeric_limits<double>::infinity();
  const double nnz_b = plan.group_b.empty() ? 1 : std::min(std::exp(log_b), cap);
  double peak = 1;
  plan.cost = group_cost(plan.group_a, cap, peak) + group_cost(plan.group_b, cap, peak) + nnz_b;
  if (peak * (16.0 * sys.size() + 32) > kHistogramBytes) plan.cost = std::numeric_limits<double>::infinity();
  return plan;
}

ValueHistogram fold_group(const PolySystem& sys, const std::vector<Block>& group, ValueHistogram acc,
                          const ValueRing& ring, const Budget& budget) {
  for (const auto& b : group) {
    const auto local = sys.restrict_to(b.vars);
    acc = convolve(acc, block_histogram(local, b.ranges, ring, budget), ring);
  }
  return acc;
}

u128 split_count(const PolySystem& sys, const SplitPlan& plan, const ValueRing& ring, const Budget& budget) {
  const int width = sys.size();
  ValueHistogram start(width);
  auto constants = sys.constants();
  for (auto& c : constants) c = ring.reduce(c);
  start.add(constants.data(), 1);
  const ValueHistogram a = fold_group(sys, plan.group_a, std::move(start), ring, budget);
  ValueHistogram unit(width);
  const std::vector<i128> zero(static_cast<std::size_t>(width), 0);
  unit.add(zero.data(), 1);
  const ValueHistogram b = fold_group(sys, plan.group_b, std::move(unit), ring, budget);
  // Probe the smaller side into the larger one.
  const bool a_small = a.size() < b.size();
  const ValueHistogram& probe = a_small ? a : b;
  const ValueHistogram& table = a_small ? b : a;
  u128 total = 0;
  std::vector<i128> key(static_cast<std::size_t>(width));
  probe.for_each([&](const i128* k, u128 c) {
    for (int i = 0; i < width; ++i) key[static_cast<std::size_t>(i)] = ring.negate(k[i]);
    total += c * table.find(key.data());
  });
  return total;
}

CountResult count_with_ring(const PolySystem& sys, const std::vector<IntRange>& ranges, const ValueRing& ring,
                            const Budget& budget, CountStrategy strategy, const std::string& what) {
  const auto start = Clock::now();
  require_count_range(ranges);
  if (!ring.modulus) require_int128_range(sys, ranges);
  const double brute_cost = LatticePoints(ranges).count_estimate();
  const auto blocks = sys.variable_blocks();
  bool use_split = strategy == CountStrategy::split;
  SplitPlan plan;
  if (strategy != CountStrategy::brute_force && blocks.size() >= 2) {
    plan = plan_split(sys, ranges, ring);
    if (strategy == CountStrategy::automatic) use_split = plan.cost < brute_cost;
  }
  if (use_split && blocks.size() < 2) use_split = false;

  CountResult result;
  if (use_split) {
    budget.require(plan.cost, what + " (split enumeration)");
    result.count = split_count(sys, plan, ring, budget);
    result.method = "split";
    result.cost = plan.cost;
  } else {
    budget.require(brute_cost, what + " (brute-force enumeration)");
    result.count = brute_force_count(sys, ranges, ring, budget);
    result.method = "brute-force";
    result.cost = brute_cost;
  }
  result.elapsed_seconds = seconds_since(start);
  return result;
}

std::vector<IntRange> residue_ranges(int num_vars, std::int64_t modulus) {
  if (modulus < 2) throw InputError("modulus must be at least 2");
  if (modulus >= (std::int64_t{1} << 31)) throw InputError("modulus must be below 2^31");
  return std::vector<IntRange>(static_cast<std::size_t>(num_vars), IntRange{0, modulus - 1});
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  std::int64_t result = 1, base = a, e = p - 2;
  for (; e > 0; e >>= 1, base = static_cast<std::int64_t>(static_cast<i128>(base) * base % p))
    if (e & 1) result = static_cast<std::int64_t>(static_cast<i128>(result) * base % p);
  return result;
}

// Homogeneous linear systems mod a prime: p^(s - rank), no enumeration.
std::optional<u128> linear_count_mod_prime(const PolySystem& sys, std::int64_t p) {
  if (!is_prime(p)) return std::nullopt;
  const std::size_t s = static_cast<std::size_t>(sys.num_vars());
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& poly : sys.polys()) {
    std::vector<std::int64_t> row(s, 0);
    for (const auto& t : poly.terms) {
      if (t.coefficient == 0) continue;
      if (t.powers.size() != 1 || t.powers[0].second != 1) return std::nullopt;
      auto& c = row[static_cast<std::size_t>(t.powers[0].first)];
      c = mod_floor(static_cast<i128>(c) + t.coefficient, p);
    }
    rows.push_back(std::move(row));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < s && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    const std::int64_t inv = inverse_mod(rows[rank][col], p);
    for (auto& v : rows[rank]) v = static_cast<std::int64_t>(static_cast<i128>(v) * inv % p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || rows[i][col] == 0) continue;
      const std::int64_t f = rows[i][col];
      for (std::size_t j = col; j < s; ++j)
        rows[i][j] = mod_floor(rows[i][j] - static_cast<i128>(f) * rows[rank][j], p);
    }
    ++rank;
  }
  u128 count = 1;
  for (std::size_t k = rank; k < s; ++k)
    if (__builtin_mul_overflow(count, static_cast<u128>(p), &count)) return std::nullopt;
  return count;
}

}  // namespace

CountResult count_poly_zeros(const PolySystem& system, std::span<const IntRange> ranges, const Budget& budget,
                             CountStrategy strategy) {
  if (static_cast<int>(ranges.size()) != system.num_vars()) throw InputError("range count does not match variables");
  std::vector<IntRange> r(ranges.begin(), ranges.end());
  return count_with_ring(system, r, ValueRing{}, budget, strategy, "zero count");
}

CountResult count_zeros(const FormSystem& system, const LatticeBox& box, const Rational& scale, const Budget& budget,
                        CountStrategy strategy) {
  if (box.dim() != system.num_vars()) throw InputError("box dimension does not match variable count");
  const auto ranges = box.scaled_ranges(scale);
  auto result = count_poly_zeros(PolySystem::from_forms(system), ranges, budget, strategy);
  result.scale = scale;
  return result;
}

CountResult count_poly_zeros_mod(const PolySystem& system, std::int64_t modulus, const Budget& budget,
                                 CountStrategy strategy) {
  const auto ranges = residue_ranges(system.num_vars(), modulus);
  if (strategy == CountStrategy::automatic) {
    if (const auto linear = linear_count_mod_prime(system, modulus)) {
      CountResult result;
      result.count = *linear;
      result.method = "linear-rank";
      result.cost = static_cast<double>(system.size()) * system.num_vars() * system.num_vars();
      result.scale = Rational(Integer(static_cast<long>(modulus)));
      return result;
    }
  }
  auto result = count_with_ring(system, ranges, ValueRing{modulus}, budget, strategy,
                                "zero count mod " + std::to_string(modulus));
  result.scale = Rational(Integer(static_cast<long>(modulus)));
  return result;
}

CountResult count_zeros_mod(const FormSystem& system, std::int64_t modulus, const Budget& budget,
                            CountStrategy strategy) {
  return count_poly_zeros_mod(PolySystem::from_forms(system), modulus, budget, strategy);
}

double count_mod_cost(const PolySystem& system, std::int64_t modulus) {
  const auto ranges = residue_ranges(system.num_vars(), modulus);
  const double brute = LatticePoints(ranges).count_estimate();
  if (linear_count_mod_prime(system, modulus)) return static_cast<double>(system.size()) * system.num_vars() * system.num_vars();
  if (system.variable_blocks().size() < 2) return brute;
  return std::min(brute, plan_split(system, ranges, ValueRing{modulus}).cost);
}

CountResult kernel_lattice_count(const RationalMatrix& matrix, const LatticeBox& box, const Rational& scale,
                                 const Budget& budget) {
  const auto start = Clock::now();
  const std::size_t s = matrix.cols();
  if (matrix.rows() != s) throw InputError("kernel_lattice_count needs a square matrix");
  if (box.dim() != static_cast<int>(s)) throw InputError("box dimension does not match matrix size");
  const auto ranges = box.scaled_ranges(scale);
  const auto reduced = rref(matrix);

  // Pivot row k: den_k * x_{p_k} = -sum_f num_{k,f} x_f.
  struct PivotRow {
    std::size_t col;
    i128 den;
    std::vector<i128> coeffs;  // per free column
  };
  std::vector<PivotRow> pivots;
  for (std::size_t k = 0; k < reduced.pivot_cols.size(); ++k) {
    Integer den = 1;
    for (std::size_t f : reduced.free_cols) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), reduced.reduced(k, f).get_den().get_mpz_t());
    PivotRow row{reduced.pivot_cols[k], to_i128(den), {}};
    for (std::size_t f : reduced.free_cols) row.coeffs.push_back(to_i128(Integer(-reduced.reduced(k, f) * den)));
    pivots.push_back(std::move(row));
  }
  std::vector<IntRange> free_ranges;
  for (std::size_t f : reduced.free_cols) free_ranges.push_back(ranges[f]);

  CountResult result;
  result.scale = scale;
  result.method = "kernel-parametrization";
  for (const auto& r : ranges) {
    if (r.size() == 0) {
      result.elapsed_seconds = seconds_since(start);
      return result;
    }
  }
  if (free_ranges.empty()) {
    // Only the origin, which lies in every box containing a lattice point at 0.
    const bool has_origin =
        std::all_of(ranges.begin(), ranges.end(), [](const IntRange& r) { return r.lo <= 0 && 0 <= r.hi; });
    result.count = has_origin ? 1 : 0;
    result.cost = 1;
    result.elapsed_seconds = seconds_since(start);
    return result;
  }
  const LatticePoints params(free_ranges);
  result.cost = params.count_estimate();
  budget.require(result.cost, "kernel lattice count");
  const auto parts = params.partition(detail::chunk_count(budget.workers));
  const auto counts = detail::run_partitioned<u128>(parts.size(), budget.workers, [&](std::size_t p) {
    u128 count = 0;
    for (const auto& y : parts[p]) {
      bool inside = true;
      for (const auto& row : pivots) {
        i128 v = 0;
        for (std::size_t f = 0; f < y.size(); ++f) v += row.coeffs[f] * y[f];
        if (v % row.den != 0) {
          inside = false;
          break;
        }
        const i128 x = v / row.den;
        if (x < ranges[row.col].lo || x > ranges[row.col].hi) {
          inside = false;
          break;
        }
      }
      if (inside) ++count;
    }
    return count;
  });
  result.count = std::accumulate(counts.begin(), counts.end(), u128{0});
  result.elapsed_seconds = seconds_since(start);
  return result;
}

}  // namespace weylsys
