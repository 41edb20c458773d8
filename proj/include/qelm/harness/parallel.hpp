// Worker pool for independent tasks. Results land in task-id order, so output
// never depends on the number of workers or on scheduling.
#ifndef QELM_HARNESS_PARALLEL_HPP
#define QELM_HARNESS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace qelm::harness {

inline constexpr const char* kWorkersEnv = "QELM_WORKERS";

/// QELM_WORKERS when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
inline std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = f(i) for i in [0, n). The first exception (lowest task id) is
/// rethrown after all workers stop.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qelm::harness

#endif  // QELM_HARNESS_PARALLEL_HPP
