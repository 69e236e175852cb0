#include <gtest/gtest.h>

#include "ebl/evolve.hpp"
#include "oracles.hpp"

using namespace ebl;

namespace {

bool non_increasing(const std::vector<double>& e, double slack) {
    for (std::size_t k = 1; k < e.size(); ++k) {
        if (e[k] > e[k - 1] + slack) return false;
    }
    return true;
}

}  // namespace

TEST(Iou, Examples) {
    const BinaryMask a = disc_mask(16, 16, 8, 8, 3);
    EXPECT_EQ(iou(a, a), 1.0);
    EXPECT_EQ(iou(BinaryMask(4, 4), BinaryMask(4, 4)), 1.0);

    BinaryMask left(10, 4), right(10, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 5; ++x) left(x, y) = 1;
        for (int x = 5; x < 10; ++x) right(x, y) = 1;
    }
    EXPECT_EQ(iou(left, right), 0.0);

    BinaryMask small(10, 2), big(10, 2);
    for (int x = 0; x < 10; ++x) {
        small(x, 0) = 1;
        big(x, 0) = big(x, 1) = 1;
    }
    EXPECT_EQ(iou(small, big), 0.5);
    EXPECT_THROW(iou(small, BinaryMask(2, 10)), std::invalid_argument);
}

TEST(GradientFlow, PerfectStartStopsImmediately) {
    const SpectralPlan plan(32, 32);
    const BinaryMask g = disc_mask(32, 32, 16, 16, 5);
    EvolveConfig cfg;
    const EvolveTrace trace = gradient_flow(g.to_field(), g, cfg, plan);
    EXPECT_EQ(trace.steps, 1);
    EXPECT_LE(trace.energies.back(), 1e-10);
    EXPECT_EQ(trace.iou_final, 1.0);
}

TEST(GradientFlow, FixedPointIsStationary) {
    const SpectralPlan plan(16, 16);
    const BinaryMask g = oracle::random_mask(16, 16, 3);
    EvolveConfig cfg;
    cfg.max_steps = 1;
    const EvolveTrace trace = gradient_flow(g.to_field(), g, cfg, plan);
    EXPECT_LE(max_abs_diff(trace.final_p, g.to_field()), 1e-10);
}

TEST(GradientFlow, ShiftedDiscIsPulledOntoTruth) {
    const SpectralPlan plan(64, 64);
    const BinaryMask g = disc_mask(64, 64, 32, 32, 6);
    EvolveConfig cfg;  // alpha 1, HardTanh beta 0.25, eta 0.5, 500 steps
    const EvolveTrace trace = gradient_flow(soft_init(cyclic_shift(g, 6, 0)), g, cfg, plan);
    EXPECT_GE(trace.iou_final, 0.95);
    EXPECT_LE(trace.steps, 500);
    EXPECT_TRUE(non_increasing(trace.energies, 1e-12));
}

TEST(GradientFlow, UniformStartRecoversTwoDiscs) {
    const SpectralPlan plan(64, 64);
    BinaryMask g = disc_mask(64, 64, 20, 22, 6);
    const BinaryMask second = disc_mask(64, 64, 44, 40, 8);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] |= second[i];
    const EvolveTrace trace = gradient_flow(ScalarField2D(64, 64, 0.5), g, EvolveConfig{}, plan);
    EXPECT_GE(trace.iou_final, 0.9);
}

TEST(GradientFlow, SmallStepIsMonotoneOnRandomConfigurations) {
    const SpectralPlan plan(48, 48);
    for (int k = 0; k < 5; ++k) {
        const BinaryMask g = disc_mask(48, 48, 24, 24, 4.0 + k);
        EvolveConfig cfg;
        cfg.eta = 0.1;
        cfg.max_steps = 150;
        const EvolveTrace trace = gradient_flow(soft_init(cyclic_shift(g, 2 + k, k - 2), 0.1 + 0.03 * k), g, cfg, plan);
        EXPECT_TRUE(non_increasing(trace.energies, 1e-12)) << k;
    }
}

TEST(GradientFlow, IteratesStayInUnitInterval) {
    const SpectralPlan plan(32, 32);
    const BinaryMask g = disc_mask(32, 32, 16, 16, 6);
    EvolveConfig cfg;
    cfg.eta = 5.0;
    cfg.max_steps = 40;
    cfg.snapshot_every = 1;
    const EvolveTrace trace = gradient_flow(soft_init(cyclic_shift(g, 4, 0)), g, cfg, plan);
    ASSERT_EQ(trace.snapshots.size(), std::size_t(trace.steps));
    for (const auto& snap : trace.snapshots) {
        for (double v : snap.values()) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
}

TEST(GradientFlow, SnapshotCadence) {
    const SpectralPlan plan(32, 32);
    const BinaryMask g = disc_mask(32, 32, 16, 16, 6);
    EvolveConfig cfg;
    cfg.max_steps = 30;
    cfg.tol = 0.0;
    cfg.snapshot_every = 10;
    const EvolveTrace trace = gradient_flow(ScalarField2D(32, 32, 0.5), g, cfg, plan);
    EXPECT_EQ(trace.steps, 30);
    EXPECT_EQ(trace.snapshots.size(), 3u);
    EXPECT_EQ(trace.energies.size(), 31u);
}

TEST(GradientFlow, DivergenceGuardHalvesThenAborts) {
    const BinaryMask g = disc_mask(16, 16, 8, 8, 3);
    EvolveConfig cfg;
    cfg.max_steps = 10000;
    cfg.tol = 0.0;
    int calls = 0;
    // Energy rises on every call regardless of the iterate.
    auto rising = [&](const ScalarField2D& p) {
        ++calls;
        return EnergyGrad{double(calls), ScalarField2D(p.width(), p.height(), 1e-3)};
    };
    EXPECT_THROW(gradient_flow(ScalarField2D(16, 16, 0.5), g, cfg, rising), DivergenceError);
    // 0.5 -> below 1e-6 takes 19 halvings of 5 increases each.
    EXPECT_EQ(calls, 1 + 19 * 5);
}

TEST(GradientFlow, GuardRecoversAfterHalving) {
    const BinaryMask g = disc_mask(16, 16, 8, 8, 3);
    EvolveConfig cfg;
    cfg.max_steps = 12;
    cfg.tol = 0.0;
    int calls = 0;
    auto bumpy = [&](const ScalarField2D& p) {
        ++calls;
        const double e = calls <= 6 ? double(calls) : 100.0 - calls;
        return EnergyGrad{e, ScalarField2D(p.width(), p.height(), 0.0)};
    };
    const EvolveTrace trace = gradient_flow(ScalarField2D(16, 16, 0.5), g, cfg, bumpy);
    EXPECT_EQ(trace.steps, 12);
    EXPECT_EQ(trace.eta_final, 0.25);
}

TEST(GradientFlow, RejectsInvalidConfig) {
    const SpectralPlan plan(16, 16);
    const BinaryMask g = disc_mask(16, 16, 8, 8, 3);
    EvolveConfig cfg;
    cfg.eta = 0.0;
    EXPECT_THROW(gradient_flow(ScalarField2D(16, 16, 0.5), g, cfg, plan), std::invalid_argument);
    cfg.eta = 0.5;
    cfg.max_steps = 0;
    EXPECT_THROW(gradient_flow(ScalarField2D(16, 16, 0.5), g, cfg, plan), std::invalid_argument);
    EXPECT_THROW(gradient_flow(ScalarField2D(8, 16, 0.5), g, EvolveConfig{}, plan), std::invalid_argument);
}
