#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "zblow/error.hpp"
#include "zblow/hermite.hpp"
#include "zblow/quadrature.hpp"

namespace zblow {

/// Low-mode split of a rescaled imaginary part and of its derivative:
///   v   = alpha phi_0 + beta phi_1 + gamma_c phi_2 + w
///   v_y = mu phi_0 + nu phi_1 + q
struct ModeDecomposition {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma_c = 0.0;
    double w_rho_sq = 0.0;
    double mu = 0.0;
    double nu = 0.0;
    double q_rho_sq = 0.0;
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
    double kappa = 0.0;
};

/// Absolute floor for accepting a negative remainder as round-off.
inline constexpr double remainder_clamp_tolerance = 1e-10;

namespace detail {
inline double clamped_remainder(double total, double captured) {
    const double r = total - captured;
    if (r >= 0.0) return r;
    const double tol = remainder_clamp_tolerance * std::max(1.0, total);
    if (-r > tol)
        throw QuadratureError("negative mode remainder " + std::to_string(r) +
                              " indicates an inconsistent quadrature");
    return 0.0;
}
} // namespace detail

inline ModeDecomposition project_modes(std::span<const double> v, std::span<const double> v_prime,
                                       const HermiteBasis& basis, double eta_bar) {
    if (basis.order < 2) throw InvalidArgument("mode projection needs a basis of order >= 2");
    if (!(eta_bar > 0.0)) throw InvalidArgument("eta_bar must be positive");
    const auto& q = basis.quad;

    ModeDecomposition m;
    m.alpha = rho_inner(q, v, basis.values[0]);
    m.beta = rho_inner(q, v, basis.values[1]);
    m.gamma_c = rho_inner(q, v, basis.values[2]);
    m.w_rho_sq = detail::clamped_remainder(rho_norm_sq(q, v),
                                           m.alpha * m.alpha + m.beta * m.beta + m.gamma_c * m.gamma_c);
    m.mu = rho_inner(q, v_prime, basis.values[0]);
    m.nu = rho_inner(q, v_prime, basis.values[1]);
    m.q_rho_sq = detail::clamped_remainder(rho_norm_sq(q, v_prime), m.mu * m.mu + m.nu * m.nu);

    m.X = m.alpha * m.alpha + m.beta * m.beta + m.gamma_c * m.gamma_c;
    m.Y = m.mu * m.mu + m.nu * m.nu;
    m.Z = m.w_rho_sq + m.q_rho_sq;
    m.kappa = eta_bar * m.X - m.Y - m.Z;
    return m;
}

/// Convenience overload that differentiates v by finite differences.
inline ModeDecomposition project_modes(std::span<const double> v, const HermiteBasis& basis,
                                       double eta_bar) {
    const auto vp = derivative(v, basis.quad.spacing());
    return project_modes(v, vp, basis, eta_bar);
}

} // namespace zblow
