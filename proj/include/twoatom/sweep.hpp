#ifndef TWOATOM_SWEEP_HPP
#define TWOATOM_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace twoatom {

/// Evaluates f(0..n-1) on up to `workers` threads. Results come back in
/// index order; if any call throws, the exception of the lowest failing
/// index is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
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

  const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(work);
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace twoatom

#endif
