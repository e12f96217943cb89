#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fedsac/fl_emulator.hpp"

using namespace fedsac;

TEST(LocalIters, AffineMapEndpointsAndMidpoint) {
    const EmulatorParams p;
    EXPECT_EQ(sample_local_iters(0.1, 0.1, 0.9, p), 2);
    EXPECT_EQ(sample_local_iters(0.9, 0.1, 0.9, p), 11);
    EXPECT_EQ(sample_local_iters(0.5, 0.1, 0.9, p), 7);  // 6.5 rounds up
    EXPECT_EQ(sample_local_iters(0.5, 0.5, 0.5, p), 7);  // degenerate range
}

TEST(LocalIters, MonotoneAndInRange) {
    const EmulatorParams p;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        const int ia = sample_local_iters(a, 0.0, 1.0, p), ib = sample_local_iters(b, 0.0, 1.0, p);
        EXPECT_GE(ia, 2);
        EXPECT_LE(ia, 11);
        if (a <= b) EXPECT_LE(ia, ib);
    }
}

TEST(GlobalBudget, ReversedAffineMap) {
    const EmulatorParams p;
    EXPECT_EQ(sample_global_budget(2.0, p), 22);
    EXPECT_EQ(sample_global_budget(11.0, p), 10);
    EXPECT_EQ(sample_global_budget(6.5, p), 16);
    for (double m = 0.0; m <= 15.0; m += 0.01) {
        const int g = sample_global_budget(m, p);
        EXPECT_GE(g, 10);
        EXPECT_LE(g, 22);
    }
}

TEST(RoundHalfUp, Ties) {
    EXPECT_EQ(round_half_up(6.5), 7);
    EXPECT_EQ(round_half_up(0.5), 1);
    EXPECT_EQ(round_half_up(1.49), 1);
}

TEST(LocalRate, Oracles) {
    EXPECT_DOUBLE_EQ(local_rate(0.16, 0, 5, 1.0, 0.5), 1.0);
    EXPECT_NEAR(local_rate(0.16, 5, 5, 1.0, 0.5), 0.5, 1e-12);
    EXPECT_NEAR(performance_rate(0.6, 0.16, 1.0), (0.6 - 1.0) / (0.16 - 1.0), 1e-12);
    EXPECT_NEAR(performance_rate(0.6, 0.16, 1.0), 0.476, 1e-3);
}

TEST(EmulatedRun, FullParticipationConvergesAtBudget) {
    std::mt19937_64 rng(0);
    EmulatedRun run(10, 0.04, 0.0);
    for (int n = 1; n <= 10; ++n) {
        const auto r = run.advance_round(1.0, rng);
        EXPECT_EQ(r.converged, n == 10);
        if (n < 10) EXPECT_NEAR(r.e_next, std::exp(std::log(0.04) * n / 10.0), 1e-12);
    }
    EXPECT_EQ(run.current_rate(), 0.04);
}

TEST(EmulatedRun, HalfParticipationTakesTwiceAsLong) {
    std::mt19937_64 rng(0);
    EmulatedRun run(10, 0.04, 0.0);
    int rounds = 0;
    while (!run.converged()) {
        run.advance_round(0.5, rng);
        ++rounds;
    }
    EXPECT_EQ(rounds, 20);
}

TEST(EmulatedRun, NoValidUpdatesNeverProgress) {
    std::mt19937_64 rng(0);
    EmulatedRun run(10, 0.04, 0.0);
    for (int n = 0; n < 200; ++n) {
        const auto r = run.advance_round(0.0, rng);
        EXPECT_FALSE(r.converged);
        EXPECT_EQ(r.e_next, 1.0);
    }
}

TEST(EmulatedRun, GeometricRatioWithoutJitter) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int g = 10 + trial % 13;
        EmulatedRun run(g, 0.04, 0.0);
        double prev = 1.0;
        while (!run.converged()) {
            const double frac = u(rng);
            const auto r = run.advance_round(frac, rng);
            if (!r.converged) EXPECT_NEAR(r.e_next / prev, std::exp(std::log(0.04) * frac / g), 1e-9);
            prev = r.e_next;
        }
        EXPECT_EQ(run.current_rate(), 0.04);
    }
}

TEST(EmulatedRun, JitterKeepsCurveMonotoneAndAboveTarget) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        EmulatedRun run(10 + trial % 13, 0.04, 0.3);
        for (int n = 0; n < 300 && !run.converged(); ++n) run.advance_round(u(rng), rng);
        const auto& c = run.rate_curve();
        for (std::size_t i = 1; i < c.size(); ++i) {
            EXPECT_LE(c[i], c[i - 1]);
            if (i + 1 < c.size()) EXPECT_GT(c[i], 0.04);
        }
        EXPECT_TRUE(run.converged());
        EXPECT_LE(c.back(), 0.04);
    }
}

TEST(EmulatorParams, Validation) {
    EmulatorParams p;
    p.local_iters_lo = 12;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_THROW(EmulatedRun(0, 0.04, 0.0), std::invalid_argument);
}
