#pragma once

#include <cstddef>
#include <functional>

namespace sdrkit {

/// Worker count honoring SDRKIT_THREADS (unset or 0 means all cores).
/// A positive `requested` wins over the environment.
int resolve_workers(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace sdrkit
