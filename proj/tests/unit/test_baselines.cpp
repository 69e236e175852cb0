#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "ebl/baselines.hpp"
#include "oracles.hpp"

using namespace ebl;

namespace {

using LossFn = std::function<LossGrad(const ScalarField2D&, const BinaryMask&)>;

double fd_error(const LossFn& fn, const ScalarField2D& p, const BinaryMask& g) {
    const LossGrad lg = fn(p, g);
    std::vector<double> analytic(lg.grad_p.values().begin(), lg.grad_p.values().end());
    std::vector<double> numeric(p.size());
    auto value = [&](const ScalarField2D& q) { return fn(q, g).loss; };
    for (std::size_t i = 0; i < p.size(); ++i) numeric[i] = oracle::central_difference(value, p, i, 1e-6);
    return oracle::max_relative_error(analytic, numeric);
}

BinaryMask from_bits(unsigned bits, int w, int h) {
    BinaryMask m(w, h);
    for (int i = 0; i < w * h; ++i) m[i] = (bits >> i) & 1u;
    return m;
}

}  // namespace

TEST(Bce, PerfectPrediction) {
    const BinaryMask g = oracle::random_mask(8, 8, 1);
    const LossGrad lg = bce_loss_grad(g.to_field(), g);
    EXPECT_NEAR(lg.loss, -std::log(1.0 - kBceEpsilon), 1e-15);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double expected = (g[i] ? -1.0 : 1.0) / ((1.0 - kBceEpsilon) * 64.0);
        EXPECT_NEAR(lg.grad_p[i], expected, 1e-12);
    }
}

TEST(Bce, HalfIsLn2) {
    for (std::uint64_t seed : {1u, 2u}) {
        EXPECT_NEAR(bce_loss_grad(ScalarField2D(8, 8, 0.5), oracle::random_mask(8, 8, seed)).loss,
                    0.69314718055994531, 1e-15);
    }
}

TEST(Bce, FiniteDifferences) {
    const ScalarField2D p = oracle::random_field(9, 7, 3, 0.05, 0.95);
    EXPECT_LE(fd_error(bce_loss_grad, p, oracle::random_mask(9, 7, 4)), 1e-6);
}

TEST(Dice, PerfectPredictionIsZero) {
    const BinaryMask g = oracle::random_mask(8, 8, 5);
    EXPECT_NEAR(dice_loss_grad(g.to_field(), g).loss, 0.0, 1e-15);
}

TEST(Dice, EmptyPrediction) {
    const BinaryMask g = oracle::random_mask(8, 8, 6);
    const double n = double(g.count());
    EXPECT_NEAR(dice_loss_grad(ScalarField2D(8, 8, 0.0), g).loss, 1.0 - 1.0 / (n + 1.0), 1e-15);
}

TEST(Dice, FiniteDifferences) {
    const ScalarField2D p = oracle::random_field(9, 7, 7, 0.0, 1.0);
    auto dice = [](const ScalarField2D& q, const BinaryMask& g) { return dice_loss_grad(q, g); };
    EXPECT_LE(fd_error(dice, p, oracle::random_mask(9, 7, 8)), 1e-6);
}

TEST(DistanceTransform, SingleCornerPixel) {
    BinaryMask m(4, 4);
    m(0, 0) = 1;
    const ScalarField2D d = distance_transform(m);
    EXPECT_EQ(d(0, 0), 0.0);
    EXPECT_NEAR(d(3, 3), std::sqrt(18.0), 1e-15);
    EXPECT_EQ(d(3, 0), 3.0);
}

TEST(DistanceTransform, AllOnesAndAllZeros) {
    const ScalarField2D full = distance_transform(BinaryMask(5, 4, 1));
    const ScalarField2D empty = distance_transform(BinaryMask(5, 4, 0));
    for (double v : full.values()) EXPECT_EQ(v, 0.0);
    for (double v : empty.values()) EXPECT_EQ(v, 9.0);
}

TEST(DistanceTransform, MatchesBruteForceExactly) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BinaryMask m = oracle::random_mask(16, 16, seed, 0.1);
        EXPECT_EQ(distance_transform(m), oracle::brute_distance(m)) << seed;
    }
    const BinaryMask sparse = oracle::random_mask(23, 9, 99, 0.02);
    EXPECT_EQ(distance_transform(sparse), oracle::brute_distance(sparse));
}

TEST(Surface, PerfectPredictionIsNonPositive) {
    const BinaryMask g = oracle::random_mask(10, 10, 11, 0.3);
    EXPECT_LE(surface_loss_grad(g.to_field(), g).loss, 0.0);
}

TEST(Surface, ZeroPrediction) {
    const BinaryMask g = oracle::random_mask(10, 10, 12, 0.3);
    const LossGrad lg = surface_loss_grad(ScalarField2D(10, 10, 0.0), g);
    EXPECT_EQ(lg.loss, 0.0);
    const ScalarField2D sdf = signed_distance(g);
    for (std::size_t i = 0; i < sdf.size(); ++i) {
        EXPECT_EQ(lg.grad_p[i], sdf[i] / 100.0);
        EXPECT_EQ(sdf[i] < 0.0, g[i] == 1);
    }
}

TEST(Surface, FiniteDifferences) {
    const ScalarField2D p = oracle::random_field(9, 7, 13, 0.0, 1.0);
    EXPECT_LE(fd_error(surface_loss_grad, p, oracle::random_mask(9, 7, 14)), 1e-6);
}

TEST(BaselineInvariants, BinaryMinimizersOn3x3) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const BinaryMask g = oracle::random_mask(3, 3, seed);
        const ScalarField2D sdf = signed_distance(g);
        BinaryMask surface_target(3, 3);
        for (int i = 0; i < 9; ++i) surface_target[i] = sdf[i] < 0.0 ? 1 : 0;

        const double bce_at_g = bce_loss_grad(g.to_field(), g).loss;
        const double dice_at_g = dice_loss_grad(g.to_field(), g).loss;
        const double surface_at_target = surface_loss_grad(surface_target.to_field(), g).loss;
        for (unsigned bits = 0; bits < 512; ++bits) {
            const ScalarField2D p = from_bits(bits, 3, 3).to_field();
            EXPECT_LE(bce_at_g, bce_loss_grad(p, g).loss);
            EXPECT_LE(dice_at_g, dice_loss_grad(p, g).loss);
            EXPECT_LE(surface_at_target, surface_loss_grad(p, g).loss);
        }
    }
}
