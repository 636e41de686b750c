#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "zblow/selfsimilar.hpp"

using namespace zblow;

namespace {

// Coarser than the defaults to keep the suite quick.
const WeightedQuadrature& quad() {
    static const auto q = build_quadrature(12, 601);
    return q;
}
const HermiteBasis& basis() {
    static const auto b = build_hermite_basis(4, quad());
    return b;
}

double coeff(const ModeSample& m, std::size_t k) {
    return k == 0 ? m.modes.alpha : k == 1 ? m.modes.beta : m.modes.gamma_c;
}

} // namespace

TEST(ToSelfSimilar, ConstantBlowupProfileMapsToOne) {
    const auto g = SpatialGrid::make(10, 201);
    const double T = 0.5, t = 0.3;
    const auto s = sample_state(g, [&](double) { return 1.0 / (T - t); }, [](double) { return 0.0; }, t);
    const auto f = to_selfsimilar(s, 0.0, T, SpatialGrid::make(12, 121));
    EXPECT_NEAR(f.s, -std::log(0.2), 1e-15);
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        EXPECT_NEAR(f.u[i], 1.0, 1e-13);
        EXPECT_EQ(f.v[i], 0.0);
    }
}

TEST(ToSelfSimilar, UnitGapIsAPureShift) {
    const auto g = SpatialGrid::make(10, 2001);
    const auto s = sample_state(g, [](double x) { return std::sin(x); }, [](double x) { return std::cos(2 * x); }, 1.0);
    const auto yg = SpatialGrid::make(3, 61);
    const auto f = to_selfsimilar(s, 1.5, 2.0, yg);
    EXPECT_EQ(f.s, 0.0);
    for (std::size_t i = 0; i < yg.n_points; ++i) {
        EXPECT_NEAR(f.u[i], std::sin(1.5 + yg.x(i)), 1e-9);
        EXPECT_NEAR(f.v[i], std::cos(2.0 * (1.5 + yg.x(i))), 1e-8);
    }
}

TEST(ToSelfSimilar, RejectsLateTimesAndUncoveredNodes) {
    const auto g = SpatialGrid::make(2, 41);
    const auto s = sample_state(g, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0);
    EXPECT_THROW(to_selfsimilar(s, 0.0, 1.0, SpatialGrid::make(1, 11)), DomainError);
    try {
        // T - t = 1 so y maps to x unchanged; |y| > 2 is off the grid
        to_selfsimilar(s, 0.0, 2.0, SpatialGrid::make(4, 9));
        FAIL() << "expected a truncation error";
    } catch (const TruncationError& e) {
        EXPECT_EQ(e.outside_count, 4u);
    }
}

TEST(ToSelfSimilar, RoundTripReproducesInteriorSamples) {
    const auto g = SpatialGrid::make(8, 1601);
    const auto s = sample_state(g, remark33_a, remark33_b, 0.9);
    const double T = 1.0;
    const auto f = to_selfsimilar(s, 0.0, T, SpatialGrid::make(20, 4001));
    const auto back = from_selfsimilar(f, SpatialGrid::make(6, 601));
    EXPECT_NEAR(back.t, 0.9, 1e-15);
    double err = 0.0;
    for (std::size_t i = 0; i < back.grid.n_points; ++i) {
        const double x = back.grid.x(i);
        err = std::max({err, std::abs(back.a[i] - remark33_a(x)), std::abs(back.b[i] - remark33_b(x))});
    }
    EXPECT_LT(err, 1e-6);
}

TEST(RescaledRhs, SteadyAndZeroStates) {
    SelfSimilarFrame f{0.0, 1.0, 0.0, quad().grid, std::vector<double>(quad().size(), 1.0),
                       std::vector<double>(quad().size(), 0.0)};
    auto r = rescaled_rhs(f);
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        EXPECT_EQ(r.da[i], 0.0);
        EXPECT_EQ(r.db[i], 0.0);
    }
    std::fill(f.u.begin(), f.u.end(), 0.0);
    r = rescaled_rhs(f);
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        EXPECT_EQ(r.da[i], 0.0);
        EXPECT_EQ(r.db[i], 0.0);
    }
}

TEST(RescaledRhs, Phi2PerturbationIsNeutral) {
    const auto& b = basis();
    const double eps = 1e-4;
    SelfSimilarFrame f{0.0, 1.0, 0.0, quad().grid, {}, std::vector<double>(quad().size(), 0.0)};
    f.u.resize(quad().size());
    for (std::size_t i = 0; i < f.u.size(); ++i) f.u[i] = 1.0 + eps * b.values[2][i];
    const auto r = rescaled_rhs(f);
    // linear part A phi_2 + phi_2 vanishes; what remains is eps^2 phi_2^2
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        if (std::abs(f.y_grid.x(i)) > 6.0) continue;
        const double p = b.values[2][i];
        EXPECT_NEAR(r.da[i], eps * eps * p * p, 1e-3 * eps);
    }
}

TEST(RescaledRhs, ShiftedAndUnshiftedFormsAgree) {
    const auto g = quad().grid;
    SelfSimilarFrame f{0.0, 1.0, 0.0, g, std::vector<double>(g.n_points), std::vector<double>(g.n_points)};
    for (std::size_t i = 0; i < g.n_points; ++i) {
        const double y = g.x(i);
        f.u[i] = 1.0 + 0.3 * std::exp(-y * y / 8.0);
        f.v[i] = 0.2 * y * std::exp(-y * y / 8.0);
    }
    const auto a = rescaled_rhs(f, VForm::Unshifted);
    const auto b = rescaled_rhs(f, VForm::Shifted);
    EXPECT_EQ(a.da, b.da);
    for (std::size_t i = 0; i < g.n_points; ++i) EXPECT_NEAR(a.db[i], b.db[i], 1e-14);
}

TEST(RunRescaled, FixedPointStaysPut) {
    const auto f0 = seeded_frame(basis(), 0, 0.0);
    const auto tr = run_rescaled(f0, 5.0, basis(), ConstantsLedger{});
    ASSERT_FALSE(tr.diverged);
    double dev = 0.0;
    for (std::size_t i = 0; i < f0.u.size(); ++i)
        dev = std::max({dev, std::abs(tr.final_frame.u[i] - 1.0), std::abs(tr.final_frame.v[i])});
    EXPECT_LT(dev, 1e-10);
    EXPECT_NEAR(tr.samples.back().s, 5.0, 1e-12);
    EXPECT_EQ(tr.samples.size(), 501u);
}

TEST(RunRescaled, SeededModesGrowAtTheirLinearRates) {
    const double expected[3] = {1.0, 0.5, 0.0};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto tr = run_rescaled(seeded_frame(basis(), k, 1e-6), 2.0, basis(), ConstantsLedger{});
        const double rate = std::log(std::abs(coeff(tr.samples.back(), k) / coeff(tr.samples.front(), k))) / 2.0;
        EXPECT_NEAR(rate, expected[k], 0.05 * std::max(expected[k], 1.0)) << "k=" << k;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != k) EXPECT_LT(std::abs(coeff(tr.samples.back(), j)), 1e-12) << "k=" << k << " j=" << j;
    }
}

TEST(RunRescaled, SamplesAreIncreasingAndDecompositionsConsistent) {
    const auto tr = run_rescaled(seeded_frame(basis(), 1, 1e-3), 1.0, basis(), ConstantsLedger{});
    for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_GT(tr.samples[k].s, tr.samples[k - 1].s);
    for (const auto& s : tr.samples) {
        const auto& m = s.modes;
        EXPECT_GE(m.w_rho_sq, 0.0);
        EXPECT_NEAR(m.X, m.alpha * m.alpha + m.beta * m.beta + m.gamma_c * m.gamma_c, 1e-18);
    }
    EXPECT_TRUE(std::isnan(tr.samples.front().r_X));
    EXPECT_TRUE(std::isnan(tr.samples.back().r_X));
    EXPECT_TRUE(std::isfinite(tr.samples[5].r_X));
}

TEST(RunRescaled, Phi0SeedSatisfiesTheInequalitiesInsideTheRegime) {
    const ConstantsLedger L{};
    const auto tr = run_rescaled(seeded_frame(basis(), 0, 1e-4), 2.0, basis(), L);
    std::size_t checked = 0;
    for (const auto& s : tr.samples) {
        if (!std::isfinite(s.r_X) || !(s.window_bound < tr.delta_bar)) continue;
        const double scale = s.modes.X + s.modes.Y + s.modes.Z;
        EXPECT_GE(s.r_X, -1e-6 * scale);
        EXPECT_GE(s.r_Y, -1e-6 * scale);
        EXPECT_GE(s.r_Z, -1e-6 * scale);
        ++checked;
    }
    EXPECT_GT(checked, 100u);
}

// The inequality system is not satisfied by every linear trajectory near
// (1, 0): a phi_1 seed makes Y grow at rate 1 against the eps (X+Y+Z) bound,
// and a phi_2 seed leaves X constant against the X/4 lower bound.
TEST(RunRescaled, Phi1AndPhi2SeedsBreakTheInequalities) {
    const ConstantsLedger L{};
    const auto t1 = run_rescaled(seeded_frame(basis(), 1, 1e-4), 1.0, basis(), L);
    const auto& m1 = t1.samples[50];
    EXPECT_LT(m1.window_bound, t1.delta_bar);
    EXPECT_LT(m1.r_Y, -0.5 * m1.modes.Y);

    const auto t2 = run_rescaled(seeded_frame(basis(), 2, 1e-4), 1.0, basis(), L);
    const auto& m2 = t2.samples[50];
    EXPECT_LT(m2.window_bound, t2.delta_bar);
    EXPECT_LT(m2.r_X, -0.2 * m2.modes.X);
}

TEST(RunRescaled, DivergenceTruncatesAndFlagsTheTrace) {
    auto f0 = seeded_frame(basis(), 0, 0.0);
    std::fill(f0.u.begin(), f0.u.end(), 3.0);
    // u' = u^2 - u from 3 leaves every bound near s = log(1.5)
    const auto tr = run_rescaled(f0, 5.0, basis(), ConstantsLedger{});
    EXPECT_TRUE(tr.diverged);
    EXPECT_GT(tr.diverged_at, 0.3);
    EXPECT_LT(tr.diverged_at, 0.5);
    EXPECT_LT(tr.samples.back().s, 0.5);
}

TEST(RunRescaled, RejectsBadArguments) {
    const auto f0 = seeded_frame(basis(), 0, 1e-6);
    EXPECT_THROW(run_rescaled(f0, 0.0, basis(), ConstantsLedger{}), InvalidArgument);
    EXPECT_THROW(run_rescaled(f0, 1.0, basis(), ConstantsLedger{1, 1, 0.01, 5}), InvalidArgument);
    auto other = f0;
    other.y_grid = SpatialGrid::make(12, 301);
    EXPECT_THROW(run_rescaled(other, 1.0, basis(), ConstantsLedger{}), InvalidArgument);
}

TEST(KappaMonitor, Phi0SeedTurnsPositiveAndStays) {
    const ConstantsLedger L{};
    const double eps = 1e-5;
    const auto tr = run_rescaled(seeded_frame(basis(), 0, eps), 2.0, basis(), L);
    const auto rep = kappa_monitor(tr, L);
    EXPECT_EQ(rep.violations, 0u);
    for (const auto& s : tr.samples) EXPECT_GT(s.modes.kappa, 0.0);
    // reduced oracle: alpha = eps e^s, Y = Z = 0
    for (double s_probe : {0.5, 1.0, 2.0}) {
        const auto& m = tr.samples[static_cast<std::size_t>(std::lround(s_probe / 0.01))];
        const double oracle = L.eta_bar * eps * eps * std::exp(2.0 * s_probe);
        EXPECT_NEAR(m.modes.kappa / oracle, 1.0, 1e-3);
    }
}

TEST(KappaMonitor, FixedPointHasNoTransitions) {
    const ConstantsLedger L{};
    const auto tr = run_rescaled(seeded_frame(basis(), 0, 0.0), 0.5, basis(), L);
    const auto rep = kappa_monitor(tr, L);
    EXPECT_TRUE(rep.transitions.empty());
    for (const auto& s : tr.samples) EXPECT_EQ(s.modes.kappa, 0.0);
}

TEST(KappaMonitor, TransitionsOutsideTheRegimeAreNotViolations) {
    ModeTrace tr;
    tr.delta_bar = 0.05;
    const double kap[] = {1.0, -1.0, 1.0, -1.0};
    const double win[] = {0.5, 0.5, 0.5, 0.01};
    for (int k = 0; k < 4; ++k) {
        ModeSample s;
        s.s = 0.1 * k;
        s.modes.kappa = kap[k];
        s.modes.Y = 1.0;
        s.modes.Z = 2.0;
        s.window_bound = win[k];
        tr.samples.push_back(s);
    }
    const auto rep = kappa_monitor(tr, ConstantsLedger{});
    ASSERT_EQ(rep.transitions.size(), 3u);
    EXPECT_FALSE(rep.transitions[0].in_regime);
    EXPECT_TRUE(rep.transitions[2].in_regime);
    EXPECT_EQ(rep.violations, 1u);
    EXPECT_EQ(rep.negative_in_regime, 1u);
    EXPECT_EQ(rep.zeta_holds, 1u);
    EXPECT_THROW(kappa_monitor(ModeTrace{}, ConstantsLedger{}), InvalidArgument);
}

TEST(CentreProfile, ExactOdeProfileIsOne) {
    const auto g = SpatialGrid::make(4, 401);
    const double T = 0.5;
    std::vector<PdeState> hist;
    for (double t : {0.0, 0.2, 0.4, 0.45, 0.49}) {
        // broad bump so that the peak spans many nodes
        hist.push_back(sample_state(g, [&](double x) { return (1.0 + 0.0 * x) / (T - t); },
                                    [](double) { return 0.0; }, t));
    }
    const auto p = centre_profile(hist, 0.0, T, 16);
    EXPECT_EQ(p.resolved, 5u);
    EXPECT_NEAR(p.s_hi, -std::log(0.01), 1e-12);
    EXPECT_EQ(p.window_samples, 3u);
    EXPECT_NEAR(p.max_deviation, 0.0, 1e-12);
    EXPECT_TRUE(p.holds(0.15));
}
