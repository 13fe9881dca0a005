#pragma once

#include <cstdint>
#include <functional>

namespace traitnet {

// Requested > 0 wins, then TRAITNET_THREADS, then 1.
int resolve_thread_count(int requested = 0);

// Runs fn(r) for r in [0, count) over `threads` workers in contiguous blocks.
// Each index writes only its own slot, so results are identical for any
// thread count; exceptions are rethrown on the caller thread.
void parallel_replicates(std::uint64_t count, int threads,
                         const std::function<void(std::uint64_t)>& fn);

}  // namespace traitnet
