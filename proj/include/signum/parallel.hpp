#pragma once

#include <cstddef>
#include <functional>

namespace signum {

/// Worker count: SIGNUM_THREADS when set (clamped to [1, 256]), otherwise
/// hardware concurrency.
int thread_count();

/// Runs fn(chunk_begin, chunk_end) over a static partition of [0, n) into at
/// most thread_count() contiguous chunks. Chunk boundaries depend only on n
/// and the thread count, so callers that merge results in chunk order stay
/// deterministic. Exceptions from workers are rethrown on the caller.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace signum
