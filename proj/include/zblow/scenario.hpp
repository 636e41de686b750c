#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "zblow/config.hpp"
#include "zblow/constants.hpp"
#include "zblow/csv.hpp"
#include "zblow/expression.hpp"
#include "zblow/hermite.hpp"
#include "zblow/ode_exact.hpp"
#include "zblow/physical_solver.hpp"
#include "zblow/selfsimilar.hpp"
#include "zblow/zero_tracker.hpp"

namespace zblow {

struct CatalogEntry {
    std::string name;
    std::string description;
    /// the statement the scenario exercises
    std::string verifies;
};

inline const std::vector<CatalogEntry>& scenario_catalog() {
    static const std::vector<CatalogEntry> c{
        {"remark33", "a0=(3-4x^2)e^{-x^2}, b0=2xe^{-x^2}; blow-up with one zero of b",
         "blow-up point equals the limit of the zero of b"},
        {"remark33_perturbed", "remark33 data with a seeded tilt of b0 that moves its zero",
         "if blow-up occurs, its point equals the limit of the zero of b; blow-up itself is not asserted"},
        {"theorem11", "a0=e^{-x^2}, b0=1 so that a0 < A b0",
         "global existence and decay when a0 < A b0"},
        {"theorem12", "data tending to constants (M, N) with M > N > 0",
         "global existence for data with positive far-field limits"},
        {"ode_constant", "spatially constant (a0, b0) against the closed-form solution",
         "homogeneous solutions and the blow-up time a0/(a0^2+b0^2)"},
        {"mode_rates", "phi_k seeds about (u, v) = (1, 0) in self-similar variables",
         "linear growth rates 1, 1/2, 0 of the low modes of v"},
        {"custom", "user expressions for a0 and b0", "none; exploratory run"},
    };
    return c;
}

struct Assertion {
    std::string name;
    bool passed = false;
    double measured = std::numeric_limits<double>::quiet_NaN();
    double tolerance = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

/// A labelled rescaled run.
struct LabelledTrace {
    std::string label;
    ModeTrace trace;
    KappaReport kappa;
};

struct RunReport {
    ScenarioConfig config;
    std::optional<BlowupReport> blowup;
    std::optional<ZeroTrack> zeros;
    std::optional<GammaAtT> gamma;
    std::optional<JumpProxy> jump;
    std::optional<QuotientMonitor> quotient;
    std::optional<CentreProfile> profile;
    std::vector<LabelledTrace> traces;
    std::vector<Assertion> assertions;
    double wall_seconds = 0.0;

    bool passed() const {
        for (const auto& a : assertions)
            if (!a.passed) return false;
        return true;
    }
    int exit_code() const { return passed() ? 0 : 1; }
};

namespace detail {

inline void check(RunReport& r, std::string name, bool ok, double measured = std::nan(""),
                  double tol = std::nan(""), std::string detail = {}) {
    r.assertions.push_back({std::move(name), ok, measured, tol, std::move(detail)});
}

inline PdeState initial_state(const ScenarioConfig& c) {
    const auto g = c.spatial_grid();
    const auto& i = c.initial;
    if (c.name == "remark33") {
        return sample_state(g, [&](double x) { return remark33_a(x - i.shift); },
                            [&](double x) { return remark33_b(x - i.shift); });
    }
    if (c.name == "remark33_perturbed") {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const double tilt = i.perturbation * dist(rng);
        return sample_state(g, [&](double x) { return remark33_a(x - i.shift); },
                            [&](double x) {
                                const double y = x - i.shift;
                                return remark33_b(y) + tilt * std::exp(-y * y);
                            });
    }
    if (c.name == "theorem11") {
        return sample_state(g, [&](double x) { return i.amplitude * std::exp(-x * x); },
                            [&](double) { return i.level; });
    }
    if (c.name == "theorem12") return theorem12_scenario(g, i.M, i.N, i.L, i.width).state;
    if (c.name == "ode_constant") {
        return sample_state(g, [&](double) { return i.a0; }, [&](double) { return i.b0; });
    }
    const auto ea = Expression::parse(i.a_expr);
    const auto eb = Expression::parse(i.b_expr);
    return sample_state(g, [&](double x) { return ea(x); }, [&](double x) { return eb(x); });
}

inline double measured_rate(const ModeTrace& tr, std::size_t k) {
    auto coeff = [k](const ModeSample& m) {
        return k == 0 ? m.modes.alpha : k == 1 ? m.modes.beta : m.modes.gamma_c;
    };
    const auto& first = tr.samples.front();
    const auto& last = tr.samples.back();
    return std::log(std::abs(coeff(last) / coeff(first))) / (last.s - first.s);
}

/// Smallest residual relative to X + Y + Z over samples inside the regime.
inline double worst_relative_residual(const ModeTrace& tr) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples) {
        if (!std::isfinite(s.r_X) || !(s.window_bound < tr.delta_bar)) continue;
        const double scale = s.modes.X + s.modes.Y + s.modes.Z;
        if (!(scale > 0.0)) continue;
        worst = std::min({worst, s.r_X / scale, s.r_Y / scale, s.r_Z / scale});
    }
    return worst;
}

inline RescaledConfig rescaled_config(const ScenarioConfig& c) {
    RescaledConfig rc;
    rc.sample_ds = c.modes.sample_ds;
    rc.delta_bar = c.modes.delta_bar;
    rc.R_bar = c.modes.R_bar;
    rc.workers = c.solver.workers;
    return rc;
}

inline void run_mode_rates(const ScenarioConfig& c, RunReport& r) {
    const auto q = build_quadrature(c.modes.y_half_width, c.modes.y_n_points);
    const auto basis = build_hermite_basis(2, q);
    const auto ledger = c.ledger();
    const double expected[3] = {1.0, 0.5, 0.0};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto f0 = seeded_frame(basis, k, c.modes.seed_amplitude);
        auto tr = run_rescaled(f0, f0.s + c.modes.s_span, basis, ledger, rescaled_config(c));
        const auto kap = kappa_monitor(tr, ledger);
        const std::string label = "phi" + std::to_string(k);
        if (tr.diverged) {
            check(r, label + "_rate", false, std::nan(""), c.modes.rate_tolerance, "rescaled run diverged");
        } else {
            const double rate = measured_rate(tr, k);
            const double err = expected[k] == 0.0 ? std::abs(rate) : std::abs(rate - expected[k]) / expected[k];
            check(r, label + "_rate", err <= c.modes.rate_tolerance, rate, c.modes.rate_tolerance,
                  "expected " + format_double(expected[k]));
        }
        if (k == 0) {
            const double worst = worst_relative_residual(tr);
            check(r, "phi0_residuals_nonnegative", worst >= -1e-6, worst, 1e-6,
                  "differential inequalities inside the near-constant regime");
            check(r, "phi0_kappa_positive", !tr.samples.empty() && tr.samples.back().modes.kappa > 0.0 &&
                                                kap.violations == 0,
                  tr.samples.back().modes.kappa, 0.0);
        }
        r.traces.push_back({label, std::move(tr), kap});
    }
}

/// Rescaled run started from the latest stored state whose y-window fits in
/// the physical grid and whose peak is still resolved.
inline void run_physical_modes(const ScenarioConfig& c, const std::vector<PdeState>& history,
                               const BlowupReport& rep, RunReport& r) {
    const auto q = build_quadrature(c.modes.y_half_width, c.modes.y_n_points);
    const auto basis = build_hermite_basis(2, q);
    const auto& g = history.front().grid;
    const double room = g.half_width - std::abs(rep.x_blowup);
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (!(it->t < rep.T_est)) continue;
        if (std::sqrt(rep.T_est - it->t) * q.grid.half_width > room) break;
        if (peak_width_of(*it) < c.analysis.resolved_peak_nodes) continue;
        const auto f0 = to_selfsimilar(*it, rep.x_blowup, rep.T_est, q.grid);
        auto tr = run_rescaled(f0, f0.s + c.modes.s_span, basis, c.ledger(), rescaled_config(c));
        auto kap = kappa_monitor(tr, c.ledger());
        r.traces.push_back({"blowup_frame", std::move(tr), kap});
        return;
    }
}

} // namespace detail

inline RunReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunReport r;
    r.config = cfg;
    const auto& c = cfg;

    if (c.name == "mode_rates") {
        detail::run_mode_rates(c, r);
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

    const PdeState init = detail::initial_state(c);
    const bool keep = c.analysis.zeros || c.analysis.quotient || c.analysis.selfsimilar || c.analysis.modes;
    std::vector<PdeState> history;

    const bool ode = c.name == "ode_constant";
    const OdeSolution sol = ode_solve(c.initial.a0, c.initial.b0);
    const double ode_horizon = sol.blows_up() ? 0.5 * sol.blowup_time() : c.solver.t_end;
    double ode_error = 0.0;

    auto observer = [&](const PdeState& s) {
        if (keep) history.push_back(s);
        if (ode && s.t <= ode_horizon) {
            const auto z = ode_eval(sol, s.t);
            for (std::size_t i = 0; i < s.a.size(); ++i)
                ode_error = std::max({ode_error, std::abs(s.a[i] - z.a), std::abs(s.b[i] - z.b)});
        }
    };
    const auto rep = run(init, c.solver_config(), observer);
    r.blowup = rep;
    const double dx = rep.dx;
    const double sup0 = rep.trajectory.front().sup_z;
    double sup_max = 0.0;
    for (const auto& row : rep.trajectory) sup_max = std::max(sup_max, row.sup_z);
    const double sup_end = rep.trajectory.back().sup_z;

    const bool blowup_kind = c.name == "remark33" || c.name == "remark33_perturbed" ||
                             (ode && sol.blows_up());
    if (rep.died && !blowup_kind) throw Error("solver produced non-finite values at t = " + format_double(rep.final_state.t));

    if (c.analysis.zeros) {
        r.zeros = track(std::span<const PdeState>(history));
        detail::check(r, "zero_count_nonincreasing", r.zeros->monotonicity_violations.empty(),
                      static_cast<double>(r.zeros->monotonicity_violations.size()), 0.0);
        if (rep.blew_up) {
            r.gamma = gamma_at_T(*r.zeros, rep);
            r.jump = gamma_jump_proxy(*r.zeros, dx);
        }
    }

    if (ode) {
        detail::check(r, "ode_max_error", ode_error <= 1e-5, ode_error, 1e-5,
                      "up to t = " + format_double(ode_horizon));
        if (sol.blows_up()) {
            detail::check(r, "blow_up_detected", rep.blew_up);
            detail::check(r, "blowup_time", std::abs(rep.T_est - sol.blowup_time()) <= 1e-3,
                          rep.T_est - sol.blowup_time(), 1e-3, "exact " + format_double(sol.blowup_time()));
            detail::check(r, "rate_exponent", std::abs(rep.rate_exponent - 1.0) <= 0.1, rep.rate_exponent, 0.1);
        } else {
            detail::check(r, "no_blow_up", !rep.blew_up);
        }
    } else if (c.name == "remark33" || c.name == "remark33_perturbed") {
        if (c.name == "remark33") detail::check(r, "blow_up_detected", rep.blew_up);
        detail::check(r, "boundary_contamination", !rep.unreliable, rep.max_boundary_ratio, 0.01);
        if (rep.blew_up && r.zeros) {
            std::size_t bad = 0;
            for (const auto& s : r.zeros->samples) bad += s.count() != 1;
            detail::check(r, "single_zero_every_sample", bad == 0, static_cast<double>(bad), 0.0);
            detail::check(r, "gamma_T_agrees", r.gamma->agrees, r.gamma->gap, 3.0 * dx);
            detail::check(r, "gamma_jump_proxy", r.jump->holds, r.jump->max_excess, 0.0);
        }
        if (rep.blew_up && c.name == "remark33")
            detail::check(r, "x_blowup_at_centre", std::abs(rep.x_blowup - c.initial.shift) <= 2.0 * dx,
                          rep.x_blowup - c.initial.shift, 2.0 * dx);
        if (rep.blew_up && c.analysis.selfsimilar) {
            r.profile = centre_profile(history, rep.x_blowup, rep.T_est, c.analysis.resolved_peak_nodes);
            detail::check(r, "centre_profile_near_one", r.profile->holds(c.analysis.profile_tolerance),
                          r.profile->max_deviation, c.analysis.profile_tolerance,
                          "s in [" + format_double(r.profile->s_lo) + ", " + format_double(r.profile->s_hi) + "]");
        }
    } else if (c.name == "theorem11" || c.name == "theorem12") {
        if (c.name == "theorem11") {
            detail::check(r, "hypothesis_a0_below_A_b0", ratio_hypothesis_holds(init, c.initial.ratio_A));
        } else {
            const auto d = theorem12_scenario(c.spatial_grid(), c.initial.M, c.initial.N, c.initial.L, c.initial.width);
            detail::check(r, "hypotheses_hold", d.hypotheses.all());
        }
        detail::check(r, "no_blow_up", !rep.blew_up && !rep.died);
        detail::check(r, "bounded_by_twice_initial", sup_max <= 2.0 * sup0, sup_max / sup0, 2.0);
        detail::check(r, "decays_below_tenth", sup_end <= 0.1 * sup0, sup_end / sup0, 0.1);
        double min_b0 = 0.0, min_b = 0.0;
        for (double v : init.b) min_b0 = std::min(min_b0, v);
        for (const auto& s : history)
            for (double v : s.b) min_b = std::min(min_b, v);
        if (min_b0 >= 0.0 && !history.empty())
            detail::check(r, "b_stays_nonnegative", min_b >= -1e-10, min_b, 1e-10);
    }

    if (c.analysis.quotient && !history.empty()) {
        double sup_b0 = sup_abs(init.b);
        r.quotient = quotient_monitor(std::span<const PdeState>(history), c.analysis.quotient_x_lo,
                                      c.analysis.quotient_x_hi, c.analysis.delta_floor_factor * sup_b0);
        detail::check(r, "quotient_maximum_principle", r.quotient->holds(c.analysis.quotient_tolerance),
                      r.quotient->max_excess, c.analysis.quotient_tolerance,
                      r.quotient->stopped ? "stopped at t = " + format_double(r.quotient->stopped_at) : "");
    }

    if (c.analysis.modes && rep.blew_up && !history.empty()) detail::run_physical_modes(c, history, rep, r);

    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------------------
// Output files.

inline void write_trajectory_csv(const BlowupReport& rep, const std::string& path) {
    CsvWriter w(path, {"t", "sup_a", "sup_b", "sup_z", "zero_count", "type1", "boundary_ratio", "peak_width"});
    for (const auto& row : rep.trajectory)
        w.cell(row.t).cell(row.sup_a).cell(row.sup_b).cell(row.sup_z).cell(row.zeros.size())
            .cell(row.type1).cell(row.boundary_ratio).cell(row.peak_width).end_row();
}

inline void write_zeros_csv(const ZeroTrack& tr, const std::string& path) {
    CsvWriter w(path, {"t", "count", "gamma", "zeros", "tie", "degenerate"});
    for (const auto& s : tr.samples)
        w.cell(s.t).cell(s.count()).cell(s.gamma ? *s.gamma : std::nan(""))
            .cell(join_doubles(s.zeros)).cell(static_cast<int>(s.tie)).cell(static_cast<int>(s.degenerate))
            .end_row();
}

inline void write_modes_csv(const std::vector<LabelledTrace>& traces, const std::string& path) {
    CsvWriter w(path, {"run", "s", "alpha", "beta", "gamma_c", "w_rho_sq", "mu", "nu", "q_rho_sq", "X", "Y", "Z",
                       "kappa", "r_X", "r_Y", "r_Z", "window_bound"});
    for (const auto& lt : traces)
        for (const auto& s : lt.trace.samples) {
            const auto& m = s.modes;
            w.cell(lt.label).cell(s.s).cell(m.alpha).cell(m.beta).cell(m.gamma_c).cell(m.w_rho_sq).cell(m.mu)
                .cell(m.nu).cell(m.q_rho_sq).cell(m.X).cell(m.Y).cell(m.Z).cell(m.kappa).cell(s.r_X).cell(s.r_Y)
                .cell(s.r_Z).cell(s.window_bound).end_row();
        }
}

inline void write_quotient_csv(const QuotientMonitor& q, const std::string& path) {
    CsvWriter w(path, {"t", "interior_sup", "boundary_sup"});
    for (const auto& s : q.samples) w.cell(s.t).cell(s.interior_sup).cell(s.boundary_sup).end_row();
}

inline nlohmann::json report_json(const RunReport& r) {
    using nlohmann::json;
    json j;
    j["scenario"] = r.config.name;
    j["config"] = to_ini(r.config);
    j["passed"] = r.passed();
    j["wall_seconds"] = r.wall_seconds;
    json as = json::array();
    for (const auto& a : r.assertions)
        as.push_back({{"name", a.name}, {"passed", a.passed}, {"measured", a.measured},
                      {"tolerance", a.tolerance}, {"detail", a.detail}});
    j["assertions"] = as;
    if (r.blowup) {
        const auto& b = *r.blowup;
        j["blowup"] = {{"blew_up", b.blew_up},
                       {"died", b.died},
                       {"T_est", b.T_est},
                       {"rate_exponent", b.rate_exponent},
                       {"rate_constant", b.rate_constant},
                       {"fit_residual", b.fit_residual},
                       {"rate_warning", b.rate_warning},
                       {"T_resolved", b.T_resolved},
                       {"rate_exponent_resolved", b.rate_exponent_resolved},
                       {"x_blowup", b.x_blowup},
                       {"type1_bound", b.type1_bound},
                       {"max_boundary_ratio", b.max_boundary_ratio},
                       {"unreliable", b.unreliable},
                       {"steps", b.steps},
                       {"dx", b.dx},
                       {"final_t", b.final_state.t},
                       {"samples", b.trajectory.size()}};
    }
    if (r.zeros) {
        std::size_t max_count = 0;
        for (const auto& s : r.zeros->samples) max_count = std::max(max_count, s.count());
        j["zeros"] = {{"samples", r.zeros->samples.size()},
                      {"max_count", max_count},
                      {"monotonicity_violations", r.zeros->monotonicity_violations.size()},
                      {"ties", r.zeros->ties},
                      {"orientation", to_string(r.zeros->orientation)}};
    }
    if (r.gamma)
        j["gamma_at_T"] = {{"applicable", r.gamma->applicable}, {"gamma_T", r.gamma->gamma_T},
                           {"gap", r.gamma->gap}, {"agrees", r.gamma->agrees}};
    if (r.jump) j["jump_proxy"] = {{"holds", r.jump->holds}, {"max_excess", r.jump->max_excess}, {"pairs", r.jump->pairs}};
    if (r.quotient)
        j["quotient"] = {{"samples", r.quotient->samples.size()}, {"stopped", r.quotient->stopped},
                         {"stopped_at", r.quotient->stopped_at}, {"max_excess", r.quotient->max_excess},
                         {"delta_floor", r.quotient->delta_floor}};
    if (r.profile)
        j["centre_profile"] = {{"T", r.profile->T}, {"xi", r.profile->xi}, {"resolved", r.profile->resolved},
                               {"s_lo", r.profile->s_lo}, {"s_hi", r.profile->s_hi},
                               {"max_deviation", r.profile->max_deviation},
                               {"window_samples", r.profile->window_samples}};
    json tr = json::array();
    for (const auto& lt : r.traces) {
        const auto& t = lt.trace;
        json kt = json::array();
        for (const auto& k : lt.kappa.transitions)
            kt.push_back({{"s", k.s}, {"to_negative", k.to_negative}, {"in_regime", k.in_regime}});
        tr.push_back({{"label", lt.label},
                      {"samples", t.samples.size()},
                      {"diverged", t.diverged},
                      {"diverged_at", t.diverged_at},
                      {"delta_bar", t.delta_bar},
                      {"R_bar", t.R_bar},
                      {"ledger", {{"eta_bar", t.ledger.eta_bar}, {"zeta_bar", t.ledger.zeta_bar},
                                  {"eps_bar", t.ledger.eps_bar}, {"eps1", t.ledger.eps1}}},
                      {"kappa_transitions", kt},
                      {"kappa_violations", lt.kappa.violations},
                      {"negative_in_regime", lt.kappa.negative_in_regime},
                      {"zeta_holds", lt.kappa.zeta_holds}});
    }
    if (!tr.empty()) j["mode_traces"] = tr;
    return j;
}

/// Writes report.json and the CSV artifacts that apply to the run.
inline void write_outputs(const RunReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    if (r.blowup) write_trajectory_csv(*r.blowup, (d / "trajectory.csv").string());
    if (r.zeros) write_zeros_csv(*r.zeros, (d / "zeros.csv").string());
    if (!r.traces.empty()) write_modes_csv(r.traces, (d / "modes.csv").string());
    if (r.quotient) write_quotient_csv(*r.quotient, (d / "quotient.csv").string());
    std::ofstream out(d / "report.json");
    if (!out) throw Error("cannot write report.json in " + dir);
    out << report_json(r).dump(2) << '\n';
}

} // namespace zblow
