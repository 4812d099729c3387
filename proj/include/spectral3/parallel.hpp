#pragma once

#include <cstddef>
#include <functional>

namespace spectral3 {

// Runs body(i) for i in [0, count) on up to `threads` workers (0 selects the hardware concurrency).
// Each index writes only its own output slot, so results do not depend on scheduling.
// If several bodies throw, the exception from the smallest index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace spectral3
