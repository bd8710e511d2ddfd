#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace weylsys::detail {

/// Runs fn(part) for part = 0..parts-1 on up to `workers` threads and returns
/// the results indexed by part, so reductions over them are order-stable.
template <class Result, class Fn>
std::vector<Result> run_partitioned(std::size_t parts, unsigned workers, Fn&& fn) {
  std::vector<Result> out;
  out.reserve(parts);
  if (workers <= 1 || parts <= 1) {
    for (std::size_t p = 0; p < parts; ++p) out.push_back(fn(p));
    return out;
  }
  std::vector<std::optional<Result>> slots(parts);
  std::vector<std::exception_ptr> errors(parts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < parts; p = next++) {
      try {
        slots[p].emplace(fn(p));
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(workers, parts);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

/// Chunk count used for partitioning outer loops.
inline std::size_t chunk_count(unsigned workers) { return workers <= 1 ? 1 : static_cast<std::size_t>(workers) * 4; }

}  // namespace weylsys::detail
