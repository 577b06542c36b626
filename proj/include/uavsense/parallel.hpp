#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace uavsense
{

inline int resolve_threads(int requested)
{
  if (requested > 0)
    return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, count) on up to `threads` workers.
/// Work is claimed dynamically; callers write results into slot i so the
/// outcome never depends on the schedule. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(count, 1)))));
  if (workers == 1)
  {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;)
    {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try
      {
        fn(i);
      }
      catch (...)
      {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(body);
  body();
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace uavsense
