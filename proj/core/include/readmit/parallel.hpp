#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace readmit {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Work is claimed dynamically, so bodies must write only to
// slots owned by their index; results are then schedule-independent. The
// exception from the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace readmit
