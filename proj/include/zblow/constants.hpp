#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "zblow/error.hpp"

namespace zblow {

/// Constants of the mode-dynamics argument.
struct ConstantsLedger {
    double eta_bar = 2.0;
    double zeta_bar = 0.5;
    double eps_bar = 0.01;
    double eps1 = 5.0;

    bool operator==(const ConstantsLedger&) const = default;
};

/// Slack of each admissibility condition; positive means satisfied.
struct ConstantsCheck {
    ConstantsLedger ledger;
    std::vector<std::string> violations;
    /// eps1 - 2((1 + zeta)/eta + zeta)
    double slack_eps1 = 0.0;
    /// 1/8 - eps ((1/eta)(1/zeta + 1) + 1/zeta)
    double slack_mix = 0.0;
    /// (1/4 - 2 eps) eta - (2 + eta^2) eps
    double slack_growth = 0.0;
    /// 1/8 - eps eta
    double slack_product = 0.0;
    /// 1/4 - eps
    double slack_eps = 0.0;

    bool valid() const { return violations.empty(); }
    double margin() const { return std::min({slack_eps1, slack_mix, slack_growth, slack_product, slack_eps}); }

    std::string describe() const {
        std::string out;
        for (const auto& v : violations) out += (out.empty() ? "" : "; ") + v;
        return out.empty() ? "admissible" : out;
    }
};

inline ConstantsCheck validate_constants(double eta_bar, double zeta_bar, double eps_bar, double eps1) {
    if (!(eta_bar > 0.0 && zeta_bar > 0.0 && eps_bar > 0.0 && eps1 > 0.0))
        throw InvalidArgument("all constants must be positive");
    ConstantsCheck c;
    c.ledger = {eta_bar, zeta_bar, eps_bar, eps1};
    const double e = eta_bar, z = zeta_bar, p = eps_bar;
    c.slack_eps1 = eps1 - 2.0 * ((1.0 + z) / e + z);
    c.slack_mix = 0.125 - p * ((1.0 / e) * (1.0 / z + 1.0) + 1.0 / z);
    c.slack_growth = (0.25 - 2.0 * p) * e - (2.0 + e * e) * p;
    c.slack_product = 0.125 - p * e;
    c.slack_eps = 0.25 - p;
    if (!(c.slack_eps1 > 0.0)) c.violations.push_back("2((1+zeta)/eta+zeta) < eps1");
    if (!(c.slack_mix > 0.0)) c.violations.push_back("eps((1/eta)(1/zeta+1)+1/zeta) < 1/8");
    if (!(c.slack_growth > 0.0)) c.violations.push_back("(1/4-2eps)eta-(2+eta^2)eps > 0");
    if (!(c.slack_product > 0.0)) c.violations.push_back("eps*eta < 1/8");
    if (!(c.slack_eps > 0.0)) c.violations.push_back("eps < 1/4");
    return c;
}

/// Grid search over log-spaced (eta, zeta, eps) for the admissible triple
/// with the largest worst-case slack.
inline std::optional<ConstantsLedger> find_admissible_constants(double eps1, int points_per_axis = 41) {
    if (!(eps1 > 0.0)) throw InvalidArgument("eps1 must be positive");
    if (points_per_axis < 2) throw InvalidArgument("grid search needs at least 2 points per axis");
    auto axis = [points_per_axis](double lo, double hi, int k) {
        return lo * std::pow(hi / lo, static_cast<double>(k) / (points_per_axis - 1));
    };
    std::optional<ConstantsLedger> best;
    double best_margin = 0.0;
    for (int i = 0; i < points_per_axis; ++i)
        for (int j = 0; j < points_per_axis; ++j)
            for (int k = 0; k < points_per_axis; ++k) {
                const auto c = validate_constants(axis(0.05, 50.0, i), axis(0.01, 10.0, j),
                                                  axis(1e-4, 0.2, k), eps1);
                if (c.valid() && (!best || c.margin() > best_margin)) {
                    best = c.ledger;
                    best_margin = c.margin();
                }
            }
    return best;
}

} // namespace zblow
