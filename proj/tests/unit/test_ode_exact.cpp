#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zblow/ode_exact.hpp"

using namespace zblow;

TEST(OdeSolve, BlowUpCase) {
    const auto s = ode_solve(1.0, 0.0);
    EXPECT_DOUBLE_EQ(s.T1, 1.0);
    EXPECT_DOUBLE_EQ(s.T2, 0.0);
    EXPECT_TRUE(s.blows_up());
    EXPECT_DOUBLE_EQ(s.blowup_time(), 1.0);
}

TEST(OdeSolve, GlobalCases) {
    const auto s = ode_solve(0.0, 1.0);
    EXPECT_DOUBLE_EQ(s.T1, 0.0);
    EXPECT_DOUBLE_EQ(s.T2, 1.0);
    EXPECT_EQ(s.regime, OdeRegime::Global);
    EXPECT_TRUE(std::isinf(s.blowup_time()));
    // negative real data decays
    EXPECT_EQ(ode_solve(-1.0, 0.0).regime, OdeRegime::Global);
    EXPECT_LT(ode_solve(-1.0, 0.0).T1, 0.0);
}

TEST(OdeSolve, ZeroData) {
    const auto s = ode_solve(0.0, 0.0);
    EXPECT_EQ(s.regime, OdeRegime::Zero);
    const auto z = ode_eval(s, 7.0);
    EXPECT_EQ(z.a, 0.0);
    EXPECT_EQ(z.b, 0.0);
}

TEST(OdeEval, Examples) {
    auto z = ode_eval(ode_solve(1.0, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(z.a, 2.0);
    EXPECT_DOUBLE_EQ(z.b, 0.0);
    z = ode_eval(ode_solve(0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(z.a, -0.5);
    EXPECT_DOUBLE_EQ(z.b, 0.5);
    EXPECT_THROW(ode_eval(ode_solve(1.0, 0.0), 1.0), DomainError);
    EXPECT_THROW(ode_eval(ode_solve(1.0, 0.0), 1.5), DomainError);
}

TEST(OdeEval, ReproducesInitialData) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double a0 = u(rng), b0 = u(rng);
        const auto z = ode_eval(ode_solve(a0, b0), 0.0);
        EXPECT_NEAR(z.a, a0, 4e-15 * std::max(1.0, std::abs(a0)));
        EXPECT_NEAR(z.b, b0, 4e-15 * std::max(1.0, std::abs(b0)));
    }
}

TEST(OdeEval, SatisfiesTheOdeByFiniteDifferences) {
    const double cases[][2] = {{1.0, 0.0}, {0.0, 1.0}, {2.0, 0.5}, {-1.0, 0.3}, {0.7, -1.2}};
    for (const auto& c : cases) {
        const auto sol = ode_solve(c[0], c[1]);
        const double t_max = sol.blows_up() ? 0.9 * sol.T1 : 10.0;
        const double h = 1e-4;
        for (int k = 1; k < 50; ++k) {
            const double t = t_max * k / 50.0;
            const auto p = ode_eval(sol, t + h), m = ode_eval(sol, t - h), z = ode_eval(sol, t);
            const double da = (p.a - m.a) / (2 * h), db = (p.b - m.b) / (2 * h);
            const double scale = 1.0 + z.a * z.a + z.b * z.b;
            EXPECT_NEAR(da, z.a * z.a - z.b * z.b, 1e-6 * scale * scale);
            EXPECT_NEAR(db, 2.0 * z.a * z.b, 1e-6 * scale * scale);
        }
    }
}

TEST(OdeEval, ModulusIdentityAndDecay) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const auto sol = ode_solve(u(rng), u(rng));
        for (double t : {0.0, 0.3, 2.0, 17.0}) {
            if (sol.blows_up() && t >= sol.T1) continue;
            const auto z = ode_eval(sol, t);
            const double d = sol.T1 - t;
            EXPECT_NEAR((z.a * z.a + z.b * z.b) * (d * d + sol.T2 * sol.T2), 1.0, 1e-12);
        }
    }
    const auto sol = ode_solve(0.0, 1.0);
    const auto z = ode_eval(sol, 100.0);
    EXPECT_LT(std::hypot(z.a, z.b), 1.0 / 10.0);
    double prev = 1.0;
    for (double t = 1.0; t <= 100.0; t += 1.0) {
        const auto w = ode_eval(sol, t);
        EXPECT_LT(std::hypot(w.a, w.b), prev);
        prev = std::hypot(w.a, w.b);
    }
}
