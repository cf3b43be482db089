#pragma once

#include <cstddef>
#include <functional>

namespace nlfront {

// Worker-pool width: NLFRONT_WORKERS env var if set, else hardware concurrency, clamped to >= 1.
int worker_count();

// Run f(i) for i in [0, n). Results must be written to caller-owned, index-addressed slots so
// output is identical for any pool width. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace nlfront
