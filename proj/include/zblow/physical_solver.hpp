#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "zblow/error.hpp"
#include "zblow/grid.hpp"
#include "zblow/parallel.hpp"
#include "zblow/rate_fit.hpp"
#include "zblow/zeros.hpp"

namespace zblow {

enum class Boundary { Neumann };

struct SolverConfig {
    SpatialGrid grid;
    double t_end = 1.0;
    /// Run stops once sup|z| reaches this value.
    double blowup_threshold = 1e8;
    double dt_safety = 0.25;
    std::size_t rate_fit_window = 40;
    Boundary boundary = Boundary::Neumann;
    /// Trajectory rows are emitted at least this often in t ...
    double sample_interval = 1e-3;
    /// ... and whenever sup|z| grew by this factor since the last row.
    double sample_growth = 1.1;
    int workers = 1;
    /// Max tolerated ratio of boundary |z| to the interior sup on blow-up runs.
    double boundary_tolerance = 0.01;
    /// RMS log residual above which the rate exponent is flagged.
    double fit_residual_tolerance = 0.05;
    /// Rows whose peak spans fewer nodes are excluded from the resolved fit.
    std::size_t resolved_peak_nodes = 16;

    void validate() const {
        if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
        if (!(blowup_threshold >= 1e3)) throw InvalidArgument("blowup_threshold must be >= 1e3");
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1)");
        if (rate_fit_window < 8) throw InvalidArgument("rate_fit_window must be >= 8");
        if (!(sample_interval > 0.0)) throw InvalidArgument("sample_interval must be positive");
        if (!(sample_growth > 1.0)) throw InvalidArgument("sample_growth must exceed 1");
        if (workers < 1) throw InvalidArgument("workers must be >= 1");
        if (resolved_peak_nodes < 3) throw InvalidArgument("resolved_peak_nodes must be >= 3");
    }
};

struct FieldRates {
    std::vector<double> da;
    std::vector<double> db;
};

namespace detail {

// Rate at node i; the neighbour sum is formed first so that mirror-symmetric
// data give mirror-symmetric rates bit for bit. Neumann ends mirror the
// interior neighbour.
struct NodeRates {
    double da;
    double db;
};

inline NodeRates node_rates(const double* a, const double* b, std::size_t i, std::size_t n,
                            double inv_h2) {
    const std::size_t l = (i == 0) ? 1 : i - 1;
    const std::size_t r = (i + 1 == n) ? n - 2 : i + 1;
    const double lap_a = ((a[l] + a[r]) - 2.0 * a[i]) * inv_h2;
    const double lap_b = ((b[l] + b[r]) - 2.0 * b[i]) * inv_h2;
    return {lap_a + (a[i] * a[i] - b[i] * b[i]), lap_b + 2.0 * a[i] * b[i]};
}

// Midpoint RK2 from (a, b) into (out_a, out_b) using (mid_a, mid_b) as scratch.
inline void rk2_into(const std::vector<double>& a, const std::vector<double>& b, double dt,
                     double inv_h2, int workers, std::vector<double>& mid_a,
                     std::vector<double>& mid_b, std::vector<double>& out_a,
                     std::vector<double>& out_b) {
    const std::size_t n = a.size();
    const double half = 0.5 * dt;
    parallel_for(n, workers, [&](std::size_t i) {
        const auto k = node_rates(a.data(), b.data(), i, n, inv_h2);
        mid_a[i] = a[i] + half * k.da;
        mid_b[i] = b[i] + half * k.db;
    });
    parallel_for(n, workers, [&](std::size_t i) {
        const auto k = node_rates(mid_a.data(), mid_b.data(), i, n, inv_h2);
        out_a[i] = a[i] + dt * k.da;
        out_b[i] = b[i] + dt * k.db;
    });
}

} // namespace detail

/// a_t = a_xx + a^2 - b^2,  b_t = b_xx + 2ab  with a three-point Laplacian.
inline FieldRates rhs(const PdeState& s, Boundary boundary = Boundary::Neumann, int workers = 1) {
    (void)boundary; // Neumann is the only far-field rule
    const std::size_t n = s.grid.n_points;
    const double inv_h2 = 1.0 / (s.grid.spacing() * s.grid.spacing());
    FieldRates r{std::vector<double>(n), std::vector<double>(n)};
    parallel_for(n, workers, [&](std::size_t i) {
        const auto k = detail::node_rates(s.a.data(), s.b.data(), i, n, inv_h2);
        r.da[i] = k.da;
        r.db[i] = k.db;
    });
    return r;
}

inline double stable_dt_from_norms(double h, double sup_a, double sup_b, double safety) {
    return safety * std::min(0.5 * h * h, 1.0 / (1.0 + sup_a + sup_b));
}

/// dt = dt_safety * min(dx^2 / 2, 1 / (1 + |a|_inf + |b|_inf)).
inline double stable_dt(const PdeState& s, const SolverConfig& cfg) {
    return stable_dt_from_norms(s.grid.spacing(), sup_abs(s.a), sup_abs(s.b), cfg.dt_safety);
}

/// One explicit midpoint (RK2) step. If a non-finite value appears the
/// pre-step state is returned with alive = false.
inline PdeState step(const PdeState& s, const SolverConfig& cfg,
                     double max_dt = std::numeric_limits<double>::infinity()) {
    const double dt = std::min(stable_dt(s, cfg), max_dt);
    const std::size_t n = s.grid.n_points;
    const double h = s.grid.spacing();
    std::vector<double> ma(n), mb(n);
    PdeState next{s.grid, std::vector<double>(n), std::vector<double>(n), s.t + dt, true};
    detail::rk2_into(s.a, s.b, dt, 1.0 / (h * h), cfg.workers, ma, mb, next.a, next.b);
    if (!all_finite(next.a) || !all_finite(next.b)) {
        PdeState dead = s;
        dead.alive = false;
        return dead;
    }
    return next;
}

struct TrajectorySample {
    double t = 0.0;
    double sup_a = 0.0;
    double sup_b = 0.0;
    double sup_z = 0.0;
    std::vector<double> zeros;
    /// (T_est - t)(|a|_inf + |b|_inf); NaN when no blow-up was detected.
    double type1 = std::numeric_limits<double>::quiet_NaN();
    /// max boundary |z| over interior sup|z|
    double boundary_ratio = 0.0;
    /// nodes with |z| >= sup|z| / 2
    std::size_t peak_width = 0;
};

struct BlowupReport {
    bool blew_up = false;
    bool died = false;
    /// Blow-up time of the discrete system, fitted on the trailing steps.
    double T_est = std::numeric_limits<double>::quiet_NaN();
    double rate_exponent = std::numeric_limits<double>::quiet_NaN();
    double rate_constant = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    bool rate_warning = false;
    /// Fit restricted to rows whose peak still spans resolved_peak_nodes
    /// nodes, i.e. before the peak collapses onto a few lattice cells.
    double T_resolved = std::numeric_limits<double>::quiet_NaN();
    double rate_exponent_resolved = std::numeric_limits<double>::quiet_NaN();
    double rate_constant_resolved = std::numeric_limits<double>::quiet_NaN();
    double fit_residual_resolved = std::numeric_limits<double>::quiet_NaN();
    double x_blowup = std::numeric_limits<double>::quiet_NaN();
    double type1_bound = std::numeric_limits<double>::quiet_NaN();
    double max_boundary_ratio = 0.0;
    bool unreliable = false;
    std::size_t steps = 0;
    double dx = 0.0;
    std::vector<TrajectorySample> trajectory;
    PdeState final_state;
};

using SampleObserver = std::function<void(const PdeState&)>;

namespace detail {

struct Norms {
    double sup_a = 0.0;
    double sup_b = 0.0;
    double sup_z = 0.0;
    bool finite = true;
};

// Sequential on purpose: the result must not depend on the worker count.
inline Norms norms_of(const std::vector<double>& a, const std::vector<double>& b) {
    Norms m;
    double z2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i], bi = b[i];
        if (!std::isfinite(ai) || !std::isfinite(bi)) {
            m.finite = false;
            return m;
        }
        m.sup_a = std::max(m.sup_a, std::abs(ai));
        m.sup_b = std::max(m.sup_b, std::abs(bi));
        z2 = std::max(z2, ai * ai + bi * bi);
    }
    m.sup_z = std::sqrt(z2);
    return m;
}

inline TrajectorySample make_sample(const PdeState& s) {
    TrajectorySample row;
    row.t = s.t;
    row.sup_a = sup_abs(s.a);
    row.sup_b = sup_abs(s.b);
    row.sup_z = sup_modulus(s.a, s.b);
    row.zeros = find_zeros(s.b, s.grid);
    const std::size_t n = s.grid.n_points;
    const double edge = std::max(std::hypot(s.a[0], s.b[0]), std::hypot(s.a[n - 1], s.b[n - 1]));
    row.boundary_ratio = row.sup_z > 0.0 ? edge / row.sup_z : 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::hypot(s.a[i], s.b[i]) >= 0.5 * row.sup_z) ++row.peak_width;
    return row;
}

} // namespace detail

/// Integrates until t_end, until sup|z| reaches the blow-up threshold, or
/// until the state stops being finite. The observer sees every state that
/// becomes a trajectory row.
inline BlowupReport run(const PdeState& initial, const SolverConfig& cfg,
                        const SampleObserver& observer = {}) {
    cfg.validate();
    if (initial.a.size() != initial.grid.n_points || initial.b.size() != initial.grid.n_points)
        throw InvalidArgument("initial fields do not match their grid");
    require_finite(initial.a, "initial a");
    require_finite(initial.b, "initial b");

    BlowupReport rep;
    const double h = initial.grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const std::size_t n = initial.grid.n_points;
    rep.dx = h;

    // per step: t, |a|_inf, |b|_inf, sup|z|
    std::vector<double> ht, ha, hb, hz;
    PdeState state = initial;
    state.alive = true;
    std::vector<double> ma(n), mb(n), na(n), nb(n);

    auto push_history = [&](double t, const detail::Norms& m) {
        ht.push_back(t);
        ha.push_back(m.sup_a);
        hb.push_back(m.sup_b);
        hz.push_back(m.sup_z);
    };
    auto emit = [&](const PdeState& s) {
        rep.trajectory.push_back(detail::make_sample(s));
        if (observer) observer(s);
    };

    detail::Norms norms = detail::norms_of(state.a, state.b);
    push_history(state.t, norms);
    emit(state);
    double next_sample_t = state.t + cfg.sample_interval;
    double last_sample_sup = norms.sup_z;

    while (true) {
        if (norms.sup_z >= cfg.blowup_threshold) {
            rep.blew_up = true;
            break;
        }
        if (state.t >= cfg.t_end) break;
        const double remaining = cfg.t_end - state.t;
        const double dt = std::min(stable_dt_from_norms(h, norms.sup_a, norms.sup_b, cfg.dt_safety), remaining);
        detail::rk2_into(state.a, state.b, dt, inv_h2, cfg.workers, ma, mb, na, nb);
        const detail::Norms next = detail::norms_of(na, nb);
        if (!next.finite) {
            rep.died = true;
            state.alive = false;
            break;
        }
        state.a.swap(na);
        state.b.swap(nb);
        state.t = (dt >= remaining) ? cfg.t_end : state.t + dt;
        norms = next;
        ++rep.steps;
        push_history(state.t, norms);

        const double z = norms.sup_z;
        const bool due = state.t >= next_sample_t || z >= last_sample_sup * cfg.sample_growth ||
                         z >= cfg.blowup_threshold || state.t >= cfg.t_end;
        if (due) {
            emit(state);
            last_sample_sup = z;
            while (next_sample_t <= state.t) next_sample_t += cfg.sample_interval;
        }
    }
    if (rep.died && rep.trajectory.back().t != state.t) emit(state);

    for (const auto& row : rep.trajectory)
        rep.max_boundary_ratio = std::max(rep.max_boundary_ratio, row.boundary_ratio);

    if (rep.blew_up) {
        const std::size_t w = std::min(cfg.rate_fit_window, ht.size());
        const std::span<const double> tt(ht.data() + ht.size() - w, w);
        const std::span<const double> zz(hz.data() + hz.size() - w, w);
        const RateFit fit = fit_blowup_rate(tt, zz);
        rep.T_est = fit.T_est;
        rep.rate_exponent = fit.exponent;
        rep.rate_constant = fit.constant;
        rep.fit_residual = fit.residual;
        rep.rate_warning = !(fit.residual <= cfg.fit_residual_tolerance);

        std::vector<double> rt, rz;
        for (const auto& row : rep.trajectory)
            if (row.peak_width >= cfg.resolved_peak_nodes) {
                rt.push_back(row.t);
                rz.push_back(row.sup_z);
            }
        const std::size_t rw = std::min(cfg.rate_fit_window, rt.size());
        if (rw >= 8) {
            const RateFit rf = fit_blowup_rate(std::span<const double>(rt.data() + rt.size() - rw, rw),
                                               std::span<const double>(rz.data() + rz.size() - rw, rw));
            rep.T_resolved = rf.T_est;
            rep.rate_exponent_resolved = rf.exponent;
            rep.rate_constant_resolved = rf.constant;
            rep.fit_residual_resolved = rf.residual;
        }

        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = state.a[i] * state.a[i] + state.b[i] * state.b[i];
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        rep.x_blowup = state.grid.x(arg);

        rep.type1_bound = 0.0;
        for (std::size_t i = 0; i < ht.size(); ++i)
            if (ht[i] < rep.T_est)
                rep.type1_bound = std::max(rep.type1_bound, (rep.T_est - ht[i]) * (ha[i] + hb[i]));
        for (auto& row : rep.trajectory)
            if (row.t < rep.T_est) row.type1 = (rep.T_est - row.t) * (row.sup_a + row.sup_b);
        rep.unreliable = rep.max_boundary_ratio > cfg.boundary_tolerance;
    }
    rep.final_state = std::move(state);
    return rep;
}

// ---------------------------------------------------------------------------
// Initial data of the standard scenarios.

/// Blow-up data whose imaginary part has a single zero at the origin.
inline double remark33_a(double x) { return (3.0 - 4.0 * x * x) * std::exp(-x * x); }
inline double remark33_b(double x) { return 2.0 * x * std::exp(-x * x); }

/// true when a0 < A b0 at every node
inline bool ratio_hypothesis_holds(const PdeState& s, double A) {
    for (std::size_t i = 0; i < s.a.size(); ++i)
        if (!(s.a[i] < A * s.b[i])) return false;
    return true;
}

struct AsymptoticDataCheck {
    bool a_in_range = false;       // 0 <= a0 <= M
    bool a_not_constant = false;   // a0 differs from M somewhere
    bool b_in_range = false;       // 0 <= b0 <= L
    bool a_limit = false;          // a0 -> M at the far field
    bool b_limit = false;          // b0 -> N at the far field
    bool all() const { return a_in_range && a_not_constant && b_in_range && a_limit && b_limit; }
};

struct AsymptoticData {
    PdeState state;
    AsymptoticDataCheck hypotheses;
};

/// Data that tend to positive constants (M, N) with M > N:
///   a0 = M (1 - exp(-(x/w)^2) / 2),  b0 = clip(N + (L - N) exp(-(x/w)^2), 0, L).
inline AsymptoticData theorem12_scenario(const SpatialGrid& grid, double M, double N, double L,
                                         double shape_width) {
    if (!(N > 0.0 && M > N)) throw InvalidArgument("asymptotic data need M > N > 0");
    if (!(L > 0.0)) throw InvalidArgument("asymptotic data need L > 0");
    if (!(shape_width > 0.0)) throw InvalidArgument("shape width must be positive");
    auto bump = [shape_width](double x) { return std::exp(-(x / shape_width) * (x / shape_width)); };
    AsymptoticData d;
    d.state = sample_state(
        grid, [&](double x) { return M * (1.0 - 0.5 * bump(x)); },
        [&](double x) { return std::clamp(N + (L - N) * bump(x), 0.0, L); });

    auto& h = d.hypotheses;
    h.a_in_range = h.b_in_range = true;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        h.a_in_range = h.a_in_range && d.state.a[i] >= 0.0 && d.state.a[i] <= M;
        h.b_in_range = h.b_in_range && d.state.b[i] >= 0.0 && d.state.b[i] <= L;
        h.a_not_constant = h.a_not_constant || d.state.a[i] != M;
    }
    const std::size_t n = grid.n_points;
    const double tol = 1e-6;
    h.a_limit = std::abs(d.state.a[0] - M) <= tol * M && std::abs(d.state.a[n - 1] - M) <= tol * M;
    h.b_limit = std::abs(d.state.b[0] - N) <= tol * N && std::abs(d.state.b[n - 1] - N) <= tol * N;
    return d;
}

} // namespace zblow
