#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zblow/error.hpp"

namespace zblow {

/// Uniform grid on [-half_width, half_width] with an odd node count, so the
/// centre node sits exactly at x = 0.
struct SpatialGrid {
    double half_width = 1.0;
    std::size_t n_points = 3;

    static SpatialGrid make(double half_width, std::size_t n_points) {
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw InvalidArgument("grid half-width must be positive and finite");
        if (n_points < 3 || n_points % 2 == 0)
            throw InvalidArgument("grid node count must be odd and >= 3, got " +
                                  std::to_string(n_points));
        return SpatialGrid{half_width, n_points};
    }

    double spacing() const { return 2.0 * half_width / static_cast<double>(n_points - 1); }
    std::size_t center() const { return (n_points - 1) / 2; }

    // Computed as an offset from the centre so that x(center - k) == -x(center + k)
    // holds bit for bit.
    double x(std::size_t i) const {
        const double offset = static_cast<double>(i) - static_cast<double>(center());
        return offset * spacing();
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_points);
        for (std::size_t i = 0; i < n_points; ++i) out[i] = x(i);
        return out;
    }

    bool operator==(const SpatialGrid&) const = default;
};

/// Sampled real and imaginary parts of z = a + ib at time t.
struct PdeState {
    SpatialGrid grid;
    std::vector<double> a;
    std::vector<double> b;
    double t = 0.0;
    bool alive = true;
};

inline PdeState sample_state(const SpatialGrid& grid,
                             const std::function<double(double)>& fa,
                             const std::function<double(double)>& fb,
                             double t = 0.0) {
    PdeState s{grid, std::vector<double>(grid.n_points), std::vector<double>(grid.n_points), t, true};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        s.a[i] = fa(x);
        s.b[i] = fb(x);
    }
    return s;
}

inline bool all_finite(std::span<const double> f) {
    for (double v : f)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_finite(std::span<const double> f, const char* what) {
    if (!all_finite(f)) throw InvalidField(std::string(what) + " contains non-finite samples");
}

inline double sup_abs(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

/// max_i sqrt(a_i^2 + b_i^2)
inline double sup_modulus(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
    return m;
}

/// Centered second-order first derivative; second-order one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

} // namespace zblow
