#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "zblow/error.hpp"
#include "zblow/grid.hpp"

namespace zblow {

/// Gaussian weight rho(y) = exp(-y^2/4).
inline double rho(double y) { return std::exp(-0.25 * y * y); }

/// Closed form of the total weight, integral of rho over the line.
inline constexpr double rho_mass = 2.0 * 1.7724538509055160273; // 2 sqrt(pi)

/// Trapezoid rule for integrals against rho on a truncated uniform y-grid.
///
/// The nodes coincide with a SpatialGrid so fields produced by the solvers can
/// be integrated without resampling. Weights are dy * rho(y_i), halved at the
/// two endpoints.
struct WeightedQuadrature {
    SpatialGrid grid;
    std::vector<double> y_nodes;
    std::vector<double> weights;

    /// Relative tolerance on sum(weights) against 2 sqrt(pi).
    static constexpr double mass_tolerance = 1e-9;

    std::size_t size() const { return y_nodes.size(); }
    double spacing() const { return grid.spacing(); }
};

inline WeightedQuadrature build_quadrature(double half_width_y, std::size_t n_nodes) {
    if (!(half_width_y > 0.0))
        throw InvalidArgument("quadrature half-width must be positive");
    if (half_width_y < 10.0)
        throw InvalidArgument("quadrature half-width must be >= 10 so the Gaussian tail is negligible");
    if (n_nodes < 16)
        throw InvalidArgument("quadrature needs at least 16 nodes");
    if (n_nodes % 2 == 0)
        throw InvalidArgument("quadrature node count must be odd so that y = 0 is a node");

    WeightedQuadrature q;
    q.grid = SpatialGrid::make(half_width_y, n_nodes);
    q.y_nodes = q.grid.nodes();
    q.weights.resize(n_nodes);
    const double dy = q.grid.spacing();
    for (std::size_t i = 0; i < n_nodes; ++i) q.weights[i] = dy * rho(q.y_nodes[i]);
    q.weights.front() *= 0.5;
    q.weights.back() *= 0.5;

    double mass = 0.0;
    for (double w : q.weights) mass += w;
    if (std::abs(mass - rho_mass) > WeightedQuadrature::mass_tolerance * rho_mass)
        throw QuadratureError("quadrature mass " + std::to_string(mass) +
                              " deviates from 2 sqrt(pi) beyond tolerance");
    return q;
}

inline void require_matching(const WeightedQuadrature& q, std::span<const double> f) {
    if (f.size() != q.size())
        throw InvalidArgument("field length " + std::to_string(f.size()) +
                              " does not match quadrature size " + std::to_string(q.size()));
}

/// <f, g>_rho, summed in node order.
inline double rho_inner(const WeightedQuadrature& q, std::span<const double> f,
                        std::span<const double> g) {
    require_matching(q, f);
    require_matching(q, g);
    require_finite(f, "field");
    require_finite(g, "field");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += q.weights[i] * f[i] * g[i];
    return s;
}

inline double rho_norm_sq(const WeightedQuadrature& q, std::span<const double> f) {
    return rho_inner(q, f, f);
}

inline double h1rho_norm_sq(const WeightedQuadrature& q, std::span<const double> f,
                            std::span<const double> f_prime) {
    return rho_norm_sq(q, f) + rho_norm_sq(q, f_prime);
}

/// Integral of y^2 f^2 rho.
inline double rho_second_moment(const WeightedQuadrature& q, std::span<const double> f) {
    require_matching(q, f);
    require_finite(f, "field");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double y = q.y_nodes[i];
        s += q.weights[i] * y * y * f[i] * f[i];
    }
    return s;
}

struct EmbeddingCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

/// Weighted Hardy-type bound: int y^2 f^2 rho <= 16 |f'|^2_rho + 4 |f|^2_rho.
///
/// It follows from expanding |(f e^{-y^2/8})'|^2 >= 0 and integrating the
/// cross term by parts.
inline EmbeddingCheck check_weighted_embedding(const WeightedQuadrature& q,
                                               std::span<const double> f,
                                               std::span<const double> f_prime) {
    EmbeddingCheck c;
    c.lhs = rho_second_moment(q, f);
    c.rhs = 16.0 * rho_norm_sq(q, f_prime) + 4.0 * rho_norm_sq(q, f);
    c.holds = c.lhs <= c.rhs;
    return c;
}

/// Mehler kernel: the solution at elapsed time theta of W_s = W_yy - (y/2) W_y + K W
/// started from w0 (sampled on the quadrature nodes), evaluated at y.
inline double drift_heat_kernel_apply(const WeightedQuadrature& q, std::span<const double> w0,
                                      double y, double theta, double growth = 0.0) {
    require_matching(q, w0);
    if (!(theta > 0.0)) throw InvalidArgument("kernel time must be positive");
    const double e = std::exp(-theta);
    const double var4 = 4.0 * (1.0 - e);
    const double shift = y * std::exp(-0.5 * theta);
    const double dy = q.spacing();
    double s = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
        const double d = shift - q.y_nodes[i];
        double w = dy;
        if (i == 0 || i + 1 == w0.size()) w *= 0.5;
        s += w * std::exp(-d * d / var4) * w0[i];
    }
    return std::exp(growth * theta) * s / (2.0 * std::sqrt(std::numbers::pi) * std::sqrt(1.0 - e));
}

} // namespace zblow
