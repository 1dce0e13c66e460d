#pragma once

#include <cstddef>
#include <functional>

namespace driftfit {

/// Worker count for a requested job count; 0 means all available cores.
unsigned resolve_jobs(unsigned jobs);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index runs once;
/// callers write results into per-index slots so output order never depends
/// on scheduling. The first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace driftfit
