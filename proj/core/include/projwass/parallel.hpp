#pragma once

#include <cstddef>
#include <functional>

namespace projwass {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work items are
/// claimed dynamically; callers write results into slot i so the reduction
/// order is independent of scheduling. jobs <= 1 runs inline. The first
/// exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace projwass
