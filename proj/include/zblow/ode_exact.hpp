#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "zblow/error.hpp"

namespace zblow {

enum class OdeRegime { Zero, Global, BlowsUp };

/// Spatially homogeneous solution of z' = z^2 with z(0) = a0 + i b0:
///   z(t) = 1 / (T1 - t - i T2),  T1 = a0/|z0|^2,  T2 = b0/|z0|^2.
struct OdeSolution {
    double a0 = 0.0;
    double b0 = 0.0;
    double T1 = 0.0;
    double T2 = 0.0;
    OdeRegime regime = OdeRegime::Zero;

    bool blows_up() const { return regime == OdeRegime::BlowsUp; }
    double blowup_time() const {
        return blows_up() ? T1 : std::numeric_limits<double>::infinity();
    }
};

/// The solution blows up only when b0 == 0 and a0 > 0; a0 < 0 with b0 == 0
/// has its pole at negative time and decays.
inline OdeSolution ode_solve(double a0, double b0) {
    if (!std::isfinite(a0) || !std::isfinite(b0))
        throw InvalidArgument("ODE initial data must be finite");
    OdeSolution s{a0, b0, 0.0, 0.0, OdeRegime::Zero};
    if (a0 == 0.0 && b0 == 0.0) return s;
    const double r2 = a0 * a0 + b0 * b0;
    s.T1 = a0 / r2;
    s.T2 = b0 / r2;
    s.regime = (b0 == 0.0 && a0 > 0.0) ? OdeRegime::BlowsUp : OdeRegime::Global;
    return s;
}

struct ComplexSample {
    double a = 0.0;
    double b = 0.0;
};

inline ComplexSample ode_eval(const OdeSolution& sol, double t) {
    if (sol.regime == OdeRegime::Zero) return {};
    if (sol.blows_up() && t >= sol.T1)
        throw DomainError("ODE solution evaluated at t=" + std::to_string(t) +
                          " at or after its blow-up time " + std::to_string(sol.T1));
    const double d = sol.T1 - t;
    const double den = d * d + sol.T2 * sol.T2;
    return {d / den, sol.T2 / den};
}

} // namespace zblow
