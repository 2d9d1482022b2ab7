#include "ensure/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ensure {

auto worker_count() -> int
{
  if (char const *env = std::getenv("ENSURE_LAB_THREADS")) {
    try {
      int const n = std::stoi(env);
      if (n >= 1)
        return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::function<void(std::size_t)> const &fn)
{
  auto const workers = std::min<std::size_t>(n, std::size_t(worker_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err)
            err = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (err)
    std::rethrow_exception(err);
}

} // namespace ensure
