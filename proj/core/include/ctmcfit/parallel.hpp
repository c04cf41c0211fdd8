#pragma once

#include <cstddef>
#include <functional>

namespace ctmcfit {

/// Worker count from CTMCFIT_WORKERS, else hardware concurrency (at least 1).
std::size_t default_worker_count();

/// Run body(i) for i in [0, count) on up to `workers` threads.
///
/// Work items are independent; callers that need reproducible results write
/// into per-index slots and reduce afterwards in index order. The first
/// exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace ctmcfit
