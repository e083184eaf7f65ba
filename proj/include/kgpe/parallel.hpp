#pragma once

#include <cstddef>
#include <functional>

namespace kgpe {

// Worker count: hardware concurrency, capped by the KGPE_THREADS environment variable.
int worker_count();

// Runs body(i) for i in [begin, end) split into contiguous chunks across workers.
// Each index is visited exactly once; the body must not depend on visitation order.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body);

} // namespace kgpe
