#pragma once

#include <cstddef>
#include <functional>

namespace hypertree {

/// Runs fn(i) for every i in [0, count) on up to hardware_concurrency
/// threads. Items must not share mutable state; callers store results by
/// index, so the merged output does not depend on scheduling. The first
/// exception thrown by an item is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t max_threads = 0);

}  // namespace hypertree
