#pragma once

#include <functional>

namespace metaviz {

/// Maps 0 to the hardware thread count, clamps negatives to 1.
int resolve_thread_count(int requested);

/// Runs body(begin, end) over a static contiguous partition of [0, count).
/// Each index is processed by exactly one worker; results must be written to
/// disjoint, preallocated locations so the schedule cannot change the output.
/// Exceptions from workers are rethrown on the calling thread.
void parallel_for_rows(int count, int threads,
                       const std::function<void(int, int)>& body);

}  // namespace metaviz
