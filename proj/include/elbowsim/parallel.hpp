#pragma once

#include <cstddef>
#include <functional>

namespace elbowsim {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace elbowsim
