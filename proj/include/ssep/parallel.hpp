#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace ssep {

/// results[i] = fn(state, i) for i in [0, n), computed by `workers` threads,
/// each owning one state from make_state(). Work is claimed index by index
/// and results land in their own slot, so the output never depends on the
/// worker count or on scheduling. The first exception thrown is rethrown.
template <class MakeState, class Fn>
auto parallel_map(std::size_t n, unsigned workers, MakeState make_state, Fn fn) {
  using State = std::invoke_result_t<MakeState>;
  using Result = std::invoke_result_t<Fn, State&, std::size_t>;
  std::vector<Result> results(n);
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    try {
      State state = make_state();
      for (std::size_t i = next++; i < n; i = next++) results[i] = fn(state, i);
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next = n;
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace ssep
