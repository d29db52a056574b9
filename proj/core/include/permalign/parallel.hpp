#pragma once

#include <cstddef>
#include <functional>

namespace permalign {

/// Runs fn(i) for every i in [0, count) on up to `threads` workers; each
/// index is claimed exactly once. Callers write results into per-index
/// slots, so any later reduction in index order is deterministic regardless
/// of the worker count. The first exception thrown by a task is rethrown
/// after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

/// --threads flag if set, else the LMC_THREADS environment variable, else
/// the hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested);

}  // namespace permalign
