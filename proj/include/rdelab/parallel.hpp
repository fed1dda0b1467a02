#pragma once

#include <cstddef>
#include <functional>

namespace rdelab {

// Runs body(i) for i in [0, count) on `workers` threads (0 or 1 runs inline).
// Each index is visited exactly once; the first exception thrown by any
// worker is rethrown after all threads have joined.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace rdelab
