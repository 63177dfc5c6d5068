#pragma once

#include <cstddef>
#include <functional>

namespace dnilab {

/// Calls fn(i) for every i in [0, count) on up to `threads` workers (0 means
/// hardware concurrency). Work is handed out by index; callers that need
/// reproducible reductions store per-index results and combine them in index
/// order afterwards. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace dnilab
