#pragma once

#include <cstddef>
#include <functional>

namespace fracflow {

/// Worker count: FRACFLOW_THREADS if set (0 = auto), else hardware size.
int worker_count();

/// Runs fn(i) for i in [0, count). Splits into contiguous chunks across
/// workers; fn must not touch shared mutable state outside its own index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fracflow
