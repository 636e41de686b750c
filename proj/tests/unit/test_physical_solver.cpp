#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "zblow/ode_exact.hpp"
#include "zblow/physical_solver.hpp"

using namespace zblow;

namespace {

PdeState constant_state(const SpatialGrid& g, double a, double b) {
    return sample_state(g, [a](double) { return a; }, [b](double) { return b; });
}

SolverConfig config_for(const SpatialGrid& g, double t_end) {
    SolverConfig c;
    c.grid = g;
    c.t_end = t_end;
    return c;
}

double max_ode_error(const PdeState& s, const OdeSolution& sol) {
    const auto z = ode_eval(sol, s.t);
    double e = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i)
        e = std::max({e, std::abs(s.a[i] - z.a), std::abs(s.b[i] - z.b)});
    return e;
}

PdeState advance_to(PdeState s, const SolverConfig& c, double t) {
    while (s.t < t) s = step(s, c, t - s.t);
    return s;
}

} // namespace

TEST(SolverConfig, RejectsOutOfRangeParameters) {
    auto c = config_for(SpatialGrid::make(1, 11), 1);
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.blowup_threshold = 100;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    bad = c;
    bad.dt_safety = 1.0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    bad = c;
    bad.rate_fit_window = 7;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    bad = c;
    bad.t_end = 0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Rhs, ConstantFields) {
    const auto g = SpatialGrid::make(5, 51);
    auto r = rhs(constant_state(g, 1, 0));
    for (std::size_t i = 0; i < g.n_points; ++i) {
        EXPECT_DOUBLE_EQ(r.da[i], 1.0);
        EXPECT_DOUBLE_EQ(r.db[i], 0.0);
    }
    r = rhs(constant_state(g, 0, 1));
    for (std::size_t i = 0; i < g.n_points; ++i) {
        EXPECT_DOUBLE_EQ(r.da[i], -1.0);
        EXPECT_DOUBLE_EQ(r.db[i], 0.0);
    }
}

TEST(Rhs, SineMatchesAnalyticDerivativeAtSecondOrder) {
    const double k = 1.3;
    double prev = 0.0;
    for (std::size_t n : {201u, 401u}) {
        const auto g = SpatialGrid::make(5, n);
        const auto s = sample_state(g, [k](double x) { return std::sin(k * x); }, [](double) { return 0.0; });
        const auto r = rhs(s);
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double x = g.x(i);
            err = std::max(err, std::abs(r.da[i] - (-k * k * std::sin(k * x) + std::sin(k * x) * std::sin(k * x))));
        }
        EXPECT_LT(err, 2e-3);
        if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.2);
        prev = err;
    }
}

TEST(Rhs, MirrorSymmetricDataGiveMirrorSymmetricRates) {
    const auto g = SpatialGrid::make(8, 801);
    const auto s = sample_state(g, remark33_a, remark33_b);
    const auto r = rhs(s);
    const std::size_t n = g.n_points;
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(r.da[i], r.da[n - 1 - i]);
        EXPECT_EQ(r.db[i], -r.db[n - 1 - i]);
    }
}

TEST(Rhs, WorkerCountDoesNotChangeBits) {
    const auto g = SpatialGrid::make(8, 801);
    const auto s = sample_state(g, remark33_a, remark33_b);
    const auto r1 = rhs(s, Boundary::Neumann, 1);
    const auto r4 = rhs(s, Boundary::Neumann, 4);
    EXPECT_EQ(r1.da, r4.da);
    EXPECT_EQ(r1.db, r4.db);
}

TEST(Step, DtFollowsTheStabilityLaw) {
    const auto g = SpatialGrid::make(10, 1001);
    const auto c = config_for(g, 1);
    const auto s = constant_state(g, 3, -4);
    const double h = g.spacing();
    EXPECT_DOUBLE_EQ(stable_dt(s, c), 0.25 * std::min(0.5 * h * h, 1.0 / 8.0));
    const auto next = step(s, c);
    EXPECT_DOUBLE_EQ(next.t - s.t, stable_dt(s, c));
    EXPECT_LE(next.t - s.t, 0.5 * h * h);
}

TEST(Step, ZeroStateStaysZero) {
    const auto g = SpatialGrid::make(10, 101);
    const auto s = step(constant_state(g, 0, 0), config_for(g, 1));
    EXPECT_GT(s.t, 0.0);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        EXPECT_EQ(s.a[i], 0.0);
        EXPECT_EQ(s.b[i], 0.0);
    }
}

TEST(Step, ConstantDataFollowTheOde) {
    const auto g = SpatialGrid::make(10, 1001);
    const auto c = config_for(g, 2);
    const auto s1 = advance_to(constant_state(g, 1, 0), c, 0.1);
    EXPECT_LE(max_ode_error(s1, ode_solve(1, 0)), 1e-5);

    const auto s2 = advance_to(constant_state(g, 0, 1), c, 1.0);
    EXPECT_NEAR(s2.a[g.center()], -0.5, 1e-5);
    EXPECT_NEAR(s2.b[g.center()], 0.5, 1e-5);
}

TEST(Step, NonFiniteResultMarksTheStateDead) {
    const auto g = SpatialGrid::make(10, 11);
    auto s = constant_state(g, 1e300, 0);
    const auto next = step(s, config_for(g, 1));
    EXPECT_FALSE(next.alive);
    EXPECT_EQ(next.t, s.t);
}

TEST(Step, OdeErrorShrinksAtSecondOrderInTime) {
    // wide spacing so that the reaction bound sets dt
    const auto g = SpatialGrid::make(10, 11);
    double errs[2];
    int k = 0;
    for (double safety : {0.2, 0.1}) {
        auto c = config_for(g, 1);
        c.dt_safety = safety;
        const auto s = advance_to(constant_state(g, 1, 0.5), c, 0.5);
        errs[k++] = max_ode_error(s, ode_solve(1, 0.5));
    }
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.4);
}

TEST(Run, RealConstantDataBlowUpAtTheOdeTime) {
    const auto g = SpatialGrid::make(10, 1001);
    const auto rep = run(constant_state(g, 2, 0), config_for(g, 1));
    ASSERT_TRUE(rep.blew_up);
    EXPECT_NEAR(rep.T_est, 0.5, 1e-3);
    EXPECT_NEAR(rep.rate_exponent, 1.0, 0.1);
    EXPECT_GT(rep.T_est, 0.0);
    EXPECT_LE(rep.T_est, 1.0);
    EXPECT_TRUE(std::isfinite(rep.type1_bound));
    EXPECT_NEAR(rep.type1_bound, 1.0, 0.05);
}

TEST(Run, OddDataBlowUpAtTheOrigin) {
    const auto g = SpatialGrid::make(8, 2001);
    const auto rep = run(sample_state(g, remark33_a, remark33_b), config_for(g, 2));
    ASSERT_TRUE(rep.blew_up);
    EXPECT_LE(std::abs(rep.x_blowup), 2.0 * g.spacing());
    EXPECT_FALSE(rep.unreliable);
    EXPECT_GT(rep.steps, 0u);
    for (const auto& row : rep.trajectory) EXPECT_EQ(row.zeros.size(), 1u);
}

TEST(Run, SymmetryIsPreservedThroughTheRun) {
    const auto g = SpatialGrid::make(8, 401);
    auto c = config_for(g, 1.0);
    double worst = 0.0;
    const std::size_t n = g.n_points;
    run(sample_state(g, remark33_a, remark33_b), c, [&](const PdeState& s) {
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(s.a[i] - s.a[n - 1 - i]));
            worst = std::max(worst, std::abs(s.b[i] + s.b[n - 1 - i]));
        }
    });
    EXPECT_LE(worst, 1e-8);
}

TEST(Run, GlobalDataDecayAndKeepTheSignOfB) {
    const auto g = SpatialGrid::make(10, 401);
    auto c = config_for(g, 20);
    c.sample_interval = 0.1;
    const auto s0 = sample_state(g, [](double x) { return std::exp(-x * x); }, [](double) { return 1.0; });
    ASSERT_TRUE(ratio_hypothesis_holds(s0, 2.0));
    double min_b = 0.0;
    const auto rep = run(s0, c, [&](const PdeState& s) {
        for (double v : s.b) min_b = std::min(min_b, v);
    });
    EXPECT_FALSE(rep.blew_up);
    const double sup0 = rep.trajectory.front().sup_z;
    for (const auto& row : rep.trajectory) EXPECT_LE(row.sup_z, 2.0 * sup0);
    EXPECT_LT(rep.trajectory.back().sup_z, 0.1 * sup0);
    EXPECT_GE(min_b, -1e-12);
    EXPECT_TRUE(std::isnan(rep.T_est));
}

TEST(Run, RejectsMismatchedOrNonFiniteInitialData) {
    const auto g = SpatialGrid::make(1, 11);
    auto s = constant_state(g, 1, 0);
    s.a.pop_back();
    EXPECT_THROW(run(s, config_for(g, 1)), InvalidArgument);
    s = constant_state(g, 1, 0);
    s.b[3] = std::nan("");
    EXPECT_THROW(run(s, config_for(g, 1)), InvalidField);
}

TEST(AsymptoticScenario, HypothesesAndParameterOrder) {
    const auto g = SpatialGrid::make(10, 1001);
    const auto d = theorem12_scenario(g, 2, 1, 3, 1);
    EXPECT_TRUE(d.hypotheses.all());
    EXPECT_THROW(theorem12_scenario(g, 1, 2, 3, 1), InvalidArgument);
    EXPECT_THROW(theorem12_scenario(g, 2, 0, 3, 1), InvalidArgument);
    EXPECT_THROW(theorem12_scenario(g, 2, 1, 0, 1), InvalidArgument);
    // too narrow a domain leaves the far field short of its limits
    const auto narrow = theorem12_scenario(SpatialGrid::make(1, 101), 2, 1, 3, 1);
    EXPECT_FALSE(narrow.hypotheses.a_limit);
}

TEST(AsymptoticScenario, RunStaysBoundedAndDecays) {
    const auto g = SpatialGrid::make(10, 401);
    auto c = config_for(g, 20);
    c.sample_interval = 0.1;
    const auto rep = run(theorem12_scenario(g, 2, 1, 3, 1).state, c);
    EXPECT_FALSE(rep.blew_up);
    const double sup0 = rep.trajectory.front().sup_z;
    for (const auto& row : rep.trajectory) EXPECT_TRUE(std::isfinite(row.sup_z));
    EXPECT_LT(rep.trajectory.back().sup_z, 0.1 * sup0);
}
