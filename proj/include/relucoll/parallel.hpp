#pragma once

#include <cstddef>
#include <functional>

namespace rc {

// Runs body(i) for i in [0, n) on up to `threads` workers.  Work is split into
// contiguous blocks; callers write results into slot i so assembly order never
// depends on scheduling.  The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

int default_thread_count();

}  // namespace rc
