#pragma once

#include <cstddef>
#include <functional>

namespace kfpls {

/// Process-wide worker cap for parallel_for. 0 restores the hardware default.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, count). Iterations must be independent and write
/// to disjoint locations; results are then identical to the serial loop
/// regardless of scheduling. Nested calls from inside a worker run serially.
/// The first exception thrown by any iteration is rethrown after all workers
/// stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kfpls
