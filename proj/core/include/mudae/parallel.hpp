#pragma once

#include <cstdint>
#include <functional>

namespace mudae {

// Resolves a worker-count request: values >= 1 pass through, 0 means
// "use hardware concurrency".
int resolve_threads(int requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Indices are
// split into contiguous blocks; callers write results into index-addressed
// slots so the output is identical for any worker count. The first exception
// thrown by a worker is rethrown on the calling thread.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

} // namespace mudae
