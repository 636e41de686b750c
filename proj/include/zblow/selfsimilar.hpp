#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "zblow/constants.hpp"
#include "zblow/error.hpp"
#include "zblow/grid.hpp"
#include "zblow/hermite.hpp"
#include "zblow/modes.hpp"
#include "zblow/parallel.hpp"
#include "zblow/physical_solver.hpp"

namespace zblow {

/// Rescaled fields around the centre xi for the blow-up time T:
///   u(y, s) = (T - t) a(xi + e^{-s/2} y, t),  v likewise with b,  s = -log(T - t).
struct SelfSimilarFrame {
    double xi = 0.0;
    double T = 0.0;
    double s = 0.0;
    SpatialGrid y_grid;
    std::vector<double> u;
    std::vector<double> v;
};

namespace detail {

// Four-point Lagrange interpolation on a uniform grid. Returns false when x
// lies outside the grid.
inline bool cubic_at(std::span<const double> f, const SpatialGrid& g, double x, double& out) {
    const double h = g.spacing();
    const double pos = (x + g.half_width) / h;
    const double last = static_cast<double>(g.n_points - 1);
    if (!(pos >= -1e-9 && pos <= last + 1e-9)) return false;
    const std::size_t n = g.n_points;
    long j = static_cast<long>(std::floor(pos)) - 1;
    j = std::clamp(j, 0L, static_cast<long>(n) - 4);
    const double p = pos - static_cast<double>(j);
    const double w0 = -(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0;
    const double w1 = p * (p - 2.0) * (p - 3.0) / 2.0;
    const double w2 = -p * (p - 1.0) * (p - 3.0) / 2.0;
    const double w3 = p * (p - 1.0) * (p - 2.0) / 6.0;
    const auto k = static_cast<std::size_t>(j);
    out = w0 * f[k] + w1 * f[k + 1] + w2 * f[k + 2] + w3 * f[k + 3];
    return true;
}

} // namespace detail

inline SelfSimilarFrame to_selfsimilar(const PdeState& state, double xi, double T,
                                       const SpatialGrid& y_grid) {
    if (!(state.t < T)) throw DomainError("rescaling needs t < T");
    if (state.grid.n_points < 4) throw InvalidArgument("physical grid too small to interpolate");
    SelfSimilarFrame f;
    f.xi = xi;
    f.T = T;
    const double tau = T - state.t;
    f.s = -std::log(tau);
    f.y_grid = y_grid;
    f.u.resize(y_grid.n_points);
    f.v.resize(y_grid.n_points);
    const double scale = std::sqrt(tau);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < y_grid.n_points; ++i) {
        const double x = xi + scale * y_grid.x(i);
        double a = 0.0, b = 0.0;
        if (!detail::cubic_at(state.a, state.grid, x, a) || !detail::cubic_at(state.b, state.grid, x, b)) {
            ++outside;
            continue;
        }
        f.u[i] = tau * a;
        f.v[i] = tau * b;
    }
    if (outside > 0)
        throw TruncationError(std::to_string(outside) + " rescaled nodes fall outside the physical grid",
                              outside);
    return f;
}

/// Inverse map onto a physical grid at t = T - e^{-s}.
inline PdeState from_selfsimilar(const SelfSimilarFrame& f, const SpatialGrid& x_grid) {
    const double tau = std::exp(-f.s);
    const double stretch = std::exp(0.5 * f.s);
    PdeState s{x_grid, std::vector<double>(x_grid.n_points), std::vector<double>(x_grid.n_points),
               f.T - tau, true};
    std::size_t outside = 0;
    for (std::size_t i = 0; i < x_grid.n_points; ++i) {
        const double y = (x_grid.x(i) - f.xi) * stretch;
        double u = 0.0, v = 0.0;
        if (!detail::cubic_at(f.u, f.y_grid, y, u) || !detail::cubic_at(f.v, f.y_grid, y, v)) {
            ++outside;
            continue;
        }
        s.a[i] = u / tau;
        s.b[i] = v / tau;
    }
    if (outside > 0)
        throw TruncationError(std::to_string(outside) + " physical nodes fall outside the rescaled grid",
                              outside);
    return s;
}

/// Algebraic form of the v equation. Unshifted: -v + 2uv. Shifted: v + 2(u - 1)v.
enum class VForm { Unshifted, Shifted };

namespace detail {

struct RescaledRates {
    double du;
    double dv;
};

// u_yy and the drift -(y/2) u_y at node i. Interior nodes are centered; the
// two outermost nodes on each side take the drift from the interior side and
// the outermost node a one-sided second derivative.
inline void rescaled_derivatives(const double* f, std::size_t i, std::size_t n, double y, double h,
                                 double& f_yy, double& drift) {
    const double inv_h = 1.0 / h, inv_h2 = inv_h * inv_h;
    if (i == 0) {
        f_yy = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv_h2;
    } else if (i + 1 == n) {
        f_yy = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv_h2;
    } else {
        f_yy = ((f[i - 1] + f[i + 1]) - 2.0 * f[i]) * inv_h2;
    }
    double f_y;
    if (i <= 1) {
        f_y = (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) * 0.5 * inv_h;
    } else if (i + 2 >= n) {
        f_y = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) * 0.5 * inv_h;
    } else {
        f_y = (f[i + 1] - f[i - 1]) * 0.5 * inv_h;
    }
    drift = -0.5 * y * f_y;
}

inline RescaledRates rescaled_node(const double* u, const double* v, std::size_t i, std::size_t n,
                                   double y, double h, VForm form) {
    double u_yy, u_dr, v_yy, v_dr;
    rescaled_derivatives(u, i, n, y, h, u_yy, u_dr);
    rescaled_derivatives(v, i, n, y, h, v_yy, v_dr);
    const double ui = u[i], vi = v[i];
    const double react_v = form == VForm::Unshifted ? (-vi + 2.0 * ui * vi) : (vi + 2.0 * (ui - 1.0) * vi);
    return {u_yy + u_dr - ui + ui * ui - vi * vi, v_yy + v_dr + react_v};
}

} // namespace detail

/// u_s = u_yy - (y/2) u_y - u + u^2 - v^2,  v_s = v_yy - (y/2) v_y - v + 2uv.
inline FieldRates rescaled_rhs(const SelfSimilarFrame& f, VForm form = VForm::Unshifted,
                               int workers = 1) {
    const std::size_t n = f.y_grid.n_points;
    if (n < 5) throw InvalidArgument("rescaled grid needs at least 5 nodes");
    if (f.u.size() != n || f.v.size() != n) throw InvalidArgument("rescaled fields do not match their grid");
    require_finite(f.u, "u");
    require_finite(f.v, "v");
    const double h = f.y_grid.spacing();
    FieldRates r{std::vector<double>(n), std::vector<double>(n)};
    parallel_for(n, workers, [&](std::size_t i) {
        const auto k = detail::rescaled_node(f.u.data(), f.v.data(), i, n, f.y_grid.x(i), h, form);
        r.da[i] = k.du;
        r.db[i] = k.dv;
    });
    return r;
}

struct RescaledConfig {
    double dt_safety = 0.25;
    /// trace sampling interval in s
    double sample_ds = 0.01;
    /// window threshold and radius of the near-constant regime
    double delta_bar = 0.05;
    double R_bar = 5.0;
    /// |u| + |v| beyond this counts as divergence
    double divergence_threshold = 1e6;
    int workers = 1;

    void validate() const {
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1)");
        if (!(sample_ds > 0.0)) throw InvalidArgument("sample_ds must be positive");
        if (!(delta_bar > 0.0)) throw InvalidArgument("delta_bar must be positive");
        if (!(R_bar > 0.0)) throw InvalidArgument("R_bar must be positive");
        if (!(divergence_threshold > 1.0)) throw InvalidArgument("divergence_threshold must exceed 1");
        if (workers < 1) throw InvalidArgument("workers must be >= 1");
    }
};

struct ModeSample {
    double s = 0.0;
    ModeDecomposition modes;
    /// sup over |y| < R_bar of |u - 1| + |u_y|
    double window_bound = 0.0;
    double sup_u = 0.0;
    double sup_v = 0.0;
    /// residuals of the differential inequalities; NaN at the two trace ends
    double r_X = std::numeric_limits<double>::quiet_NaN();
    double r_Y = std::numeric_limits<double>::quiet_NaN();
    double r_Z = std::numeric_limits<double>::quiet_NaN();
};

struct ModeTrace {
    std::vector<ModeSample> samples;
    bool diverged = false;
    double diverged_at = std::numeric_limits<double>::quiet_NaN();
    ConstantsLedger ledger;
    double delta_bar = 0.0;
    double R_bar = 0.0;
    SelfSimilarFrame final_frame;
};

/// Frame of the constant state (1, 0) plus eps * phi_k in v, on the basis grid.
inline SelfSimilarFrame seeded_frame(const HermiteBasis& basis, std::size_t k, double eps, double s0 = 0.0) {
    if (k > basis.order) throw InvalidArgument("seed mode exceeds the basis order");
    SelfSimilarFrame f;
    f.T = 1.0;
    f.s = s0;
    f.y_grid = basis.quad.grid;
    f.u.assign(f.y_grid.n_points, 1.0);
    f.v.resize(f.y_grid.n_points);
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = eps * basis.values[k][i];
    return f;
}

namespace detail {

inline ModeSample sample_modes(const SelfSimilarFrame& f, const HermiteBasis& basis, double eta_bar,
                               double R_bar) {
    ModeSample m;
    m.s = f.s;
    m.modes = project_modes(f.v, basis, eta_bar);
    const auto uy = derivative(f.u, f.y_grid.spacing());
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        if (std::abs(f.y_grid.x(i)) < R_bar)
            m.window_bound = std::max(m.window_bound, std::abs(f.u[i] - 1.0) + std::abs(uy[i]));
        m.sup_u = std::max(m.sup_u, std::abs(f.u[i]));
        m.sup_v = std::max(m.sup_v, std::abs(f.v[i]));
    }
    return m;
}

inline void fill_residuals(ModeTrace& tr) {
    auto& s = tr.samples;
    const double eps = tr.ledger.eps_bar;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        const double ds = s[k + 1].s - s[k - 1].s;
        const auto& m = s[k].modes;
        const double dX = (s[k + 1].modes.X - s[k - 1].modes.X) / ds;
        const double dY = (s[k + 1].modes.Y - s[k - 1].modes.Y) / ds;
        const double dZ = (s[k + 1].modes.Z - s[k - 1].modes.Z) / ds;
        s[k].r_X = dX - (0.25 * m.X - eps * (m.Y + m.Z));
        s[k].r_Y = eps * (m.X + m.Y + m.Z) - std::abs(dY);
        s[k].r_Z = (-0.25 * m.Z + eps * (m.X + m.Y)) - dZ;
    }
}

} // namespace detail

/// Integrates the rescaled system from frame0 to s_end with explicit midpoint
/// steps and records the mode functionals of v every sample_ds.
inline ModeTrace run_rescaled(const SelfSimilarFrame& frame0, double s_end, const HermiteBasis& basis,
                              const ConstantsLedger& ledger, const RescaledConfig& cfg = {}) {
    cfg.validate();
    const auto check = validate_constants(ledger.eta_bar, ledger.zeta_bar, ledger.eps_bar, ledger.eps1);
    if (!check.valid()) throw InvalidArgument("constants ledger is not admissible: " + check.describe());
    if (!(s_end > frame0.s)) throw InvalidArgument("s_end must exceed the initial s");
    if (!(frame0.y_grid == basis.quad.grid))
        throw InvalidArgument("rescaled grid must coincide with the quadrature grid");
    const std::size_t n = frame0.y_grid.n_points;
    if (frame0.u.size() != n || frame0.v.size() != n)
        throw InvalidArgument("rescaled fields do not match their grid");
    require_finite(frame0.u, "u");
    require_finite(frame0.v, "v");

    ModeTrace tr;
    tr.ledger = ledger;
    tr.delta_bar = cfg.delta_bar;
    tr.R_bar = cfg.R_bar;

    SelfSimilarFrame f = frame0;
    const double h = f.y_grid.spacing();
    const double y_max = f.y_grid.half_width;
    std::vector<double> y = f.y_grid.nodes();
    std::vector<double> mu(n), mv(n), nu_(n), nv(n);

    auto rk2 = [&](double dt) {
        parallel_for(n, cfg.workers, [&](std::size_t i) {
            const auto k = detail::rescaled_node(f.u.data(), f.v.data(), i, n, y[i], h, VForm::Unshifted);
            mu[i] = f.u[i] + 0.5 * dt * k.du;
            mv[i] = f.v[i] + 0.5 * dt * k.dv;
        });
        parallel_for(n, cfg.workers, [&](std::size_t i) {
            const auto k = detail::rescaled_node(mu.data(), mv.data(), i, n, y[i], h, VForm::Unshifted);
            nu_[i] = f.u[i] + dt * k.du;
            nv[i] = f.v[i] + dt * k.dv;
        });
    };

    tr.samples.push_back(detail::sample_modes(f, basis, ledger.eta_bar, cfg.R_bar));
    std::size_t sample_index = 1;
    const double s0 = f.s;
    double sup = tr.samples.back().sup_u + tr.samples.back().sup_v;
    while (f.s < s_end) {
        const double next_sample = std::min(s0 + static_cast<double>(sample_index) * cfg.sample_ds, s_end);
        const double dt_bound = cfg.dt_safety * std::min({0.5 * h * h, 1.0 / (1.0 + sup), 2.0 * h / y_max});
        const double dt = std::min(dt_bound, next_sample - f.s);
        rk2(dt);
        double next_sup = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(nu_[i]) || !std::isfinite(nv[i])) {
                finite = false;
                break;
            }
            next_sup = std::max(next_sup, std::abs(nu_[i]) + std::abs(nv[i]));
        }
        if (!finite || next_sup > cfg.divergence_threshold) {
            tr.diverged = true;
            tr.diverged_at = f.s;
            break;
        }
        f.u.swap(nu_);
        f.v.swap(nv);
        sup = next_sup;
        const bool at_sample = dt >= next_sample - f.s;
        f.s = at_sample ? next_sample : f.s + dt;
        if (at_sample) {
            tr.samples.push_back(detail::sample_modes(f, basis, ledger.eta_bar, cfg.R_bar));
            ++sample_index;
        }
    }
    detail::fill_residuals(tr);
    tr.final_frame = std::move(f);
    return tr;
}

// ---------------------------------------------------------------------------

struct KappaTransition {
    double s = 0.0;
    /// true for kappa >= 0 -> kappa < 0, false for the reverse
    bool to_negative = false;
    /// window bound below delta_bar at the transition
    bool in_regime = false;
};

struct KappaReport {
    std::vector<KappaTransition> transitions;
    /// nonnegative-to-negative transitions inside the regime
    std::size_t violations = 0;
    /// samples with kappa < 0 inside the regime, and how many of them have zeta_bar Y < Z
    std::size_t negative_in_regime = 0;
    std::size_t zeta_holds = 0;
};

inline KappaReport kappa_monitor(const ModeTrace& trace, const ConstantsLedger& ledger) {
    if (trace.samples.empty()) throw InvalidArgument("kappa monitor needs a nonempty trace");
    KappaReport r;
    const auto& s = trace.samples;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const bool regime = s[k].window_bound < trace.delta_bar;
        const auto& m = s[k].modes;
        if (regime && m.kappa < 0.0) {
            ++r.negative_in_regime;
            if (ledger.zeta_bar * m.Y < m.Z) ++r.zeta_holds;
        }
        if (k == 0) continue;
        const bool was_nonneg = s[k - 1].modes.kappa >= 0.0;
        const bool is_nonneg = m.kappa >= 0.0;
        if (was_nonneg == is_nonneg) continue;
        KappaTransition t{s[k].s, was_nonneg, regime};
        if (t.to_negative && t.in_regime) ++r.violations;
        r.transitions.push_back(t);
    }
    return r;
}

// ---------------------------------------------------------------------------

/// u(0, s) = (T - t) a(xi, t) along the sampled states of a blow-up run.
struct CentreProfile {
    double T = 0.0;
    double xi = 0.0;
    std::vector<double> s;
    std::vector<double> u0;
    /// states used: t < T and peak spread over at least the resolved node count
    std::size_t resolved = 0;
    /// last factor ten in T - t of the resolved range
    double s_lo = std::numeric_limits<double>::quiet_NaN();
    double s_hi = std::numeric_limits<double>::quiet_NaN();
    double max_deviation = std::numeric_limits<double>::quiet_NaN();
    std::size_t window_samples = 0;

    bool holds(double tol) const { return window_samples > 0 && max_deviation <= tol; }
};

inline std::size_t peak_width_of(const PdeState& s) {
    double sup2 = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) sup2 = std::max(sup2, s.a[i] * s.a[i] + s.b[i] * s.b[i]);
    std::size_t w = 0;
    for (std::size_t i = 0; i < s.a.size(); ++i)
        if (s.a[i] * s.a[i] + s.b[i] * s.b[i] >= 0.25 * sup2) ++w;
    return w;
}

inline CentreProfile centre_profile(std::span<const PdeState> history, double xi, double T,
                                    std::size_t min_peak_nodes) {
    CentreProfile p;
    p.T = T;
    p.xi = xi;
    for (const auto& st : history) {
        if (!(st.t < T) || peak_width_of(st) < min_peak_nodes) continue;
        double a = 0.0;
        if (!detail::cubic_at(st.a, st.grid, xi, a)) throw TruncationError("centre outside the grid", 1);
        p.s.push_back(-std::log(T - st.t));
        p.u0.push_back((T - st.t) * a);
    }
    p.resolved = p.s.size();
    if (p.s.empty()) return p;
    p.s_hi = *std::max_element(p.s.begin(), p.s.end());
    p.s_lo = p.s_hi - std::log(10.0);
    p.max_deviation = 0.0;
    for (std::size_t k = 0; k < p.s.size(); ++k)
        if (p.s[k] >= p.s_lo) {
            p.max_deviation = std::max(p.max_deviation, std::abs(p.u0[k] - 1.0));
            ++p.window_samples;
        }
    return p;
}

} // namespace zblow
