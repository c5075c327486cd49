#pragma once

#include <cstddef>
#include <functional>

namespace dynabc {

/// Number of worker threads: DYNABC_THREADS if set, otherwise the
/// hardware concurrency.
unsigned worker_count();

/// Run fn(i) for i in [0, n) on a small worker pool. Callers store
/// results by index and reduce sequentially afterwards, so the outcome
/// is independent of scheduling.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dynabc
