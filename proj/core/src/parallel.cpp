#include "qct/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qct {
namespace {

std::atomic<unsigned> g_threads{0};

// Nested parallel_for calls run serially on the calling worker.
thread_local bool t_inside_region = false;

unsigned resolve(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_default_threads(unsigned threads) noexcept { g_threads.store(threads); }

unsigned default_threads() noexcept { return resolve(g_threads.load()); }

void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t chunks = (count + grain - 1) / grain;
  const std::size_t workers = std::min<std::size_t>(default_threads(), chunks);

  if (workers <= 1 || t_inside_region) {
    for (std::size_t c = 0; c < chunks; ++c) {
      body(c * grain, std::min(count, (c + 1) * grain));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    const bool outer = t_inside_region;
    t_inside_region = true;
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) break;
      try {
        body(c * grain, std::min(count, (c + 1) * grain));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
    t_inside_region = outer;
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qct
