#pragma once

#include <cstddef>
#include <functional>

namespace cmek {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// is visited exactly once; the first exception thrown by any body is
/// rethrown on the calling thread after all workers have stopped.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace cmek
