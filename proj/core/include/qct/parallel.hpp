#pragma once

#include <cstddef>
#include <functional>

namespace qct {

/// Worker count used by parallel_for. 0 selects std::thread::hardware_concurrency().
void set_default_threads(unsigned threads) noexcept;
unsigned default_threads() noexcept;

/// Runs body(begin, end) over [0, count) split into contiguous chunks of at most
/// `grain` items. Chunk boundaries depend only on (count, grain), never on the
/// worker count, so callers that derive randomness from item indices get the
/// same result serially or threaded. Exceptions thrown by a chunk are rethrown.
/// A parallel_for issued from inside another one runs serially.
void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace qct
