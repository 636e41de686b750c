#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zblow/error.hpp"
#include "zblow/quadrature.hpp"

namespace zblow {

/// Dense polynomial, coeffs[k] multiplies y^k.
struct Polynomial {
    std::vector<double> coeffs;

    double operator()(double y) const {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs.size() <= 1) return Polynomial{{0.0}};
        Polynomial d;
        d.coeffs.resize(coeffs.size() - 1);
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            d.coeffs[k - 1] = static_cast<double>(k) * coeffs[k];
        return d;
    }

    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    friend Polynomial operator+(Polynomial p, const Polynomial& r) {
        if (p.coeffs.size() < r.coeffs.size()) p.coeffs.resize(r.coeffs.size(), 0.0);
        for (std::size_t k = 0; k < r.coeffs.size(); ++k) p.coeffs[k] += r.coeffs[k];
        return p;
    }
    friend Polynomial operator*(double c, Polynomial p) {
        for (auto& v : p.coeffs) v *= c;
        return p;
    }
    /// Multiply by y.
    Polynomial shifted_up() const {
        Polynomial p;
        p.coeffs.assign(coeffs.size() + 1, 0.0);
        std::copy(coeffs.begin(), coeffs.end(), p.coeffs.begin() + 1);
        return p;
    }
};

/// A f = f'' - (y/2) f', applied exactly to a polynomial.
inline Polynomial apply_ou_operator(const Polynomial& p) {
    const Polynomial d1 = p.derivative();
    return p.derivative().derivative() + (-0.5) * d1.shifted_up();
}

/// rho-orthonormal eigenfunctions of A = d^2/dy^2 - (y/2) d/dy.
///
/// phi_k(y) = He_k(y / sqrt 2) / sqrt(k! 2 sqrt(pi)) with He the probabilists'
/// Hermite polynomials; A phi_k = -(k/2) phi_k. phi_2 is proportional to y^2 - 2.
struct HermiteBasis {
    std::size_t order = 0;
    WeightedQuadrature quad;
    std::vector<Polynomial> phi;
    std::vector<double> eigenvalues;
    /// phi_k sampled on the quadrature nodes.
    std::vector<std::vector<double>> values;
    /// Build-time diagnostics.
    double orthonormality_error = 0.0;
    double eigen_residual = 0.0;

    static constexpr std::size_t max_order = 8;
    static constexpr double tolerance = 1e-8;
};

inline HermiteBasis build_hermite_basis(std::size_t order, const WeightedQuadrature& quad) {
    if (order > HermiteBasis::max_order)
        throw InvalidArgument("Hermite basis order must be <= 8, got " + std::to_string(order));

    HermiteBasis basis;
    basis.order = order;
    basis.quad = quad;

    // He_{k+1}(x) = x He_k(x) - k He_{k-1}(x), evaluated at x = y / sqrt 2.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Polynomial> he{Polynomial{{1.0}}};
    if (order >= 1) he.push_back(Polynomial{{0.0, inv_sqrt2}});
    for (std::size_t k = 1; k < order; ++k)
        he.push_back(inv_sqrt2 * he[k].shifted_up() + (-static_cast<double>(k)) * he[k - 1]);

    double factorial = 1.0;
    for (std::size_t k = 0; k <= order; ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        basis.phi.push_back((1.0 / std::sqrt(factorial * rho_mass)) * he[k]);
        basis.eigenvalues.push_back(-0.5 * static_cast<double>(k));
    }

    for (const auto& p : basis.phi) {
        std::vector<double> v(quad.size());
        for (std::size_t i = 0; i < quad.size(); ++i) v[i] = p(quad.y_nodes[i]);
        basis.values.push_back(std::move(v));
    }

    for (std::size_t j = 0; j <= order; ++j)
        for (std::size_t k = 0; k <= j; ++k) {
            const double g = rho_inner(quad, basis.values[j], basis.values[k]);
            basis.orthonormality_error =
                std::max(basis.orthonormality_error, std::abs(g - (j == k ? 1.0 : 0.0)));
        }

    for (std::size_t k = 0; k <= order; ++k) {
        const Polynomial r = apply_ou_operator(basis.phi[k]) + (0.5 * static_cast<double>(k)) * basis.phi[k];
        std::vector<double> rv(quad.size());
        for (std::size_t i = 0; i < quad.size(); ++i) rv[i] = r(quad.y_nodes[i]);
        basis.eigen_residual = std::max(basis.eigen_residual, std::sqrt(rho_norm_sq(quad, rv)));
    }

    if (basis.orthonormality_error > HermiteBasis::tolerance)
        throw QuadratureError("Hermite basis orthonormality error " +
                              std::to_string(basis.orthonormality_error) + " exceeds tolerance");
    if (basis.eigen_residual > HermiteBasis::tolerance)
        throw QuadratureError("Hermite eigen-residual " + std::to_string(basis.eigen_residual) +
                              " exceeds tolerance");
    return basis;
}

} // namespace zblow
