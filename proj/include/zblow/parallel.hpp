#pragma once

#include <cstddef>
#include <cstdint>

namespace zblow {

// Pointwise loop over [0, n). Each index is written by exactly one thread and
// no reductions happen here, so results do not depend on the worker count.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
    const auto count = static_cast<std::int64_t>(n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#pragma omp parallel for num_threads(workers) schedule(static)
    for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

} // namespace zblow
