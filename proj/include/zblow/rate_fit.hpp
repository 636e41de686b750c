#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "zblow/error.hpp"

namespace zblow {

/// sup|z|(t) ~ constant * (T_est - t)^(-exponent), fitted in log-log form.
struct RateFit {
    double T_est = std::numeric_limits<double>::quiet_NaN();
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double constant = std::numeric_limits<double>::quiet_NaN();
    /// RMS residual of the log-log regression.
    double residual = std::numeric_limits<double>::infinity();
    std::size_t samples = 0;
};

/// Least-squares fit of log(sup) = log(C) - q log(T - t) for a fixed T.
inline RateFit fit_power_law_at(std::span<const double> t, std::span<const double> sup, double T) {
    RateFit f;
    f.T_est = T;
    f.samples = t.size();
    const double n = static_cast<double>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double gap = T - t[i];
        if (!(gap > 0.0) || !(sup[i] > 0.0)) return f;
        const double x = std::log(gap), y = std::log(sup[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) return f;
    const double slope = (n * sxy - sx * sy) / den;
    const double icpt = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = std::log(sup[i]) - (icpt + slope * std::log(T - t[i]));
        ss += r * r;
    }
    f.exponent = -slope;
    f.constant = std::exp(icpt);
    f.residual = std::sqrt(ss / n);
    return f;
}

/// Joint estimate of blow-up time and rate.
///
/// The gap T - t_last is searched on a log scale: a coarse scan brackets the
/// residual minimum, then golden-section search refines it.
inline RateFit fit_blowup_rate(std::span<const double> t, std::span<const double> sup) {
    if (t.size() != sup.size() || t.size() < 3)
        throw InvalidArgument("rate fit needs at least three (t, sup) samples");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw InvalidArgument("rate fit samples must be strictly increasing in t");

    const double t_last = t.back();
    const double last_step = t_last - t[t.size() - 2];
    const double span = t_last - t.front();
    const double lo = std::log(1e-4 * last_step);
    const double hi = std::log(10.0 * span);

    auto residual_at = [&](double theta) {
        return fit_power_law_at(t, sup, t_last + std::exp(theta)).residual;
    };

    constexpr int scan = 400;
    int best = 0;
    double best_r = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= scan; ++k) {
        const double r = residual_at(lo + (hi - lo) * k / scan);
        if (r < best_r) {
            best_r = r;
            best = k;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / scan;
    double b = lo + (hi - lo) * std::min(best + 1, scan) / scan;

    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = residual_at(c), fd = residual_at(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = residual_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = residual_at(d);
        }
    }
    return fit_power_law_at(t, sup, t_last + std::exp(0.5 * (a + b)));
}

} // namespace zblow
