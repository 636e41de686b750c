#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zblow/grid.hpp"

namespace zblow {

/// Sign-change zeros of a sampled field, in increasing order.
///
/// A strict sign change between neighbours yields one zero placed by linear
/// interpolation. Runs of exact zeros count once, at their midpoint, when the
/// values on either side of the run have opposite signs; a run that touches
/// zero without a sign change is not a zero crossing.
inline std::vector<double> find_zeros(std::span<const double> b, const SpatialGrid& grid) {
    std::vector<double> zeros;
    const std::size_t n = b.size();
    std::size_t i = 0;
    // skip a leading run of exact zeros, it has no left neighbour to compare with
    while (i < n && b[i] == 0.0) ++i;
    while (i < n) {
        std::size_t j = i + 1;
        if (j >= n) break;
        if (b[j] == 0.0) {
            std::size_t k = j;
            while (k < n && b[k] == 0.0) ++k;
            if (k == n) break;
            if ((b[i] > 0.0) != (b[k] > 0.0)) zeros.push_back(0.5 * (grid.x(j) + grid.x(k - 1)));
            i = k;
            continue;
        }
        if ((b[i] > 0.0) != (b[j] > 0.0)) {
            const double xi = grid.x(i), xj = grid.x(j);
            zeros.push_back(xi + (xj - xi) * b[i] / (b[i] - b[j]));
        }
        i = j;
    }
    return zeros;
}

} // namespace zblow
