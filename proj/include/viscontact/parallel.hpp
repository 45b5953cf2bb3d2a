#pragma once

#include <functional>

namespace viscontact {

/// Worker count for one parallel region: the requested count (0 = 1), capped
/// by the VISCONTACT_THREADS environment variable when it is set.
int resolve_thread_count(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers in contiguous
/// chunks. Bodies must write disjoint state; results are then identical to
/// the sequential order. Exceptions from workers are rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace viscontact
