#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "ebl/spectral.hpp"
#include "oracles.hpp"

using namespace ebl;

TEST(SpectralPlan, RejectsSmallOrBadGrids) {
    EXPECT_THROW(SpectralPlan(3, 8), std::invalid_argument);
    EXPECT_THROW(SpectralPlan(8, 2), std::invalid_argument);
    EXPECT_THROW(SpectralPlan(8, 8, 0.0), std::invalid_argument);
    EXPECT_THROW(SpectralPlan(8, 8, -1.0), std::invalid_argument);
}

TEST(SpectralPlan, KMagValues8x8) {
    const SpectralPlan plan(8, 8);
    const ScalarField2D& k = plan.k_mag();
    EXPECT_EQ(k(0, 0), 0.0);
    EXPECT_NEAR(k(1, 0), 0.78539816339744831, 1e-15);  // 2*pi/8
    EXPECT_EQ(k(1, 0), k(7, 0));
    EXPECT_NEAR(k(4, 4), 2 * std::numbers::pi * std::sqrt(0.5), 1e-14);
}

TEST(SpectralPlan, SpacingScalesFrequencies) {
    const SpectralPlan plan(8, 8, 0.5);
    EXPECT_NEAR(plan.k_mag()(1, 0), 2 * std::numbers::pi / 4.0, 1e-14);
}

TEST(SpectralPlan, KMagInvariants) {
    for (auto [w, h] : {std::pair{8, 8}, std::pair{9, 6}, std::pair{16, 5}}) {
        const SpectralPlan plan(w, h);
        const ScalarField2D& k = plan.k_mag();
        EXPECT_EQ(k(0, 0), 0.0);
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) {
                EXPECT_GE(k(i, j), 0.0);
                EXPECT_EQ(k(i, j), k((w - i) % w, (h - j) % h));
            }
        }
    }
}

TEST(SpectralTransforms, ForwardMatchesNaiveDft) {
    const SpectralPlan plan(6, 5);
    const ScalarField2D f = oracle::random_field(6, 5, 21);
    const ComplexField2D fast = plan.forward(f);
    const auto slow = oracle::naive_dft(f);
    for (std::size_t i = 0; i < slow.size(); ++i) EXPECT_LT(std::abs(fast.values[i] - slow[i]), 1e-12);
}

TEST(SpectralTransforms, RoundTrip) {
    const SpectralPlan plan(16, 16);
    const ScalarField2D f = oracle::random_field(16, 16, 1);
    EXPECT_LE(max_abs_diff(plan.inverse_real(plan.forward(f)), f), 1e-12);
}

TEST(SpectralTransforms, ConstantHasOnlyDc) {
    const SpectralPlan plan(8, 6);
    const ComplexField2D c = plan.forward(ScalarField2D(8, 6, 2.5));
    EXPECT_NEAR(c.values[0].real(), 2.5 * 48, 1e-12);
    for (std::size_t i = 1; i < c.values.size(); ++i) EXPECT_LT(std::abs(c.values[i]), 1e-12);
}

TEST(SpectralTransforms, Parseval) {
    const SpectralPlan plan(16, 16);
    const ScalarField2D f = oracle::random_field(16, 16, 2);
    const ComplexField2D c = plan.forward(f);
    double spatial = 0.0;
    double spectral = 0.0;
    for (double v : f.values()) spatial += v * v;
    for (const auto& z : c.values) spectral += std::norm(z);
    spectral /= 256.0;
    EXPECT_LE(std::abs(spatial - spectral) / spatial, 1e-10);
}

TEST(SpectralTransforms, DimensionMismatchThrows) {
    const SpectralPlan plan(8, 8);
    EXPECT_THROW(plan.forward(ScalarField2D(8, 9)), std::invalid_argument);
    EXPECT_THROW(plan.apply_halfnorm(ScalarField2D(4, 4)), std::invalid_argument);
}

TEST(SpectralTransforms, InverseRealRejectsAsymmetricSpectrum) {
    const SpectralPlan plan(8, 8);
    ComplexField2D c{8, 8, std::vector<std::complex<double>>(64, 0.0)};
    c(1, 0) = 1.0;  // no matching conjugate at (7, 0)
    EXPECT_THROW(plan.inverse_real(c), std::runtime_error);
}

TEST(ApplyHalfnorm, ConstantIsAnnihilated) {
    const SpectralPlan plan(12, 10);
    EXPECT_LE(max_abs(plan.apply_halfnorm(ScalarField2D(12, 10, -3.0))), 1e-12);
}

TEST(ApplyHalfnorm, OutputIsMeanFree) {
    const SpectralPlan plan(16, 16);
    const ScalarField2D out = plan.apply_halfnorm(oracle::random_field(16, 16, 3));
    double mean = 0.0;
    for (double v : out.values()) mean += v;
    EXPECT_LE(std::abs(mean / 256.0), 1e-10);
}

TEST(ApplyHalfnorm, Linear) {
    const SpectralPlan plan(16, 16);
    const ScalarField2D f = oracle::random_field(16, 16, 4);
    const ScalarField2D g = oracle::random_field(16, 16, 5);
    const double a = 1.7;
    const double b = -0.3;
    ScalarField2D combo(16, 16);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f[i] + b * g[i];
    const ScalarField2D lhs = plan.apply_halfnorm(combo);
    const ScalarField2D af = plan.apply_halfnorm(f);
    const ScalarField2D bg = plan.apply_halfnorm(g);
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], a * af[i] + b * bg[i], 1e-10);
}

TEST(ApplyHalfnorm, ImpulseReproducesShiftedKernel) {
    const SpectralPlan plan(8, 8);
    ScalarField2D impulse(8, 8, 0.0);
    impulse(4, 4) = 1.0;
    const ScalarField2D out = plan.apply_halfnorm(impulse);
    const ScalarField2D kernel = plan.kernel_table();
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) EXPECT_NEAR(out(x, y), kernel((x + 4) % 8, (y + 4) % 8), 1e-12);
    }
}

TEST(KernelTable, SumsToDcCoefficient) {
    const SpectralPlan plan(16, 12);
    const ScalarField2D k = plan.kernel_table();
    double s = 0.0;
    for (double v : k.values()) s += v;
    EXPECT_LE(std::abs(s), 1e-10);
}

TEST(KernelTable, EvenUnderNegation) {
    const SpectralPlan plan(16, 12);
    const ScalarField2D k = plan.kernel_table();
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 16; ++x) EXPECT_NEAR(k(x, y), k((16 - x) % 16, (12 - y) % 12), 1e-12);
    }
}

TEST(KernelTable, DirectConvolutionMatchesHalfnorm) {
    const SpectralPlan plan(16, 16);
    const ScalarField2D f = oracle::random_field(16, 16, 6);
    const ScalarField2D direct = oracle::cyclic_convolve(plan.kernel_table(), f);
    const ScalarField2D fast = plan.apply_halfnorm(f);
    EXPECT_LE(max_abs_diff(direct, fast) / max_abs(fast), 1e-10);
}

TEST(HalfnormProperties, SelfAdjointAndPositive) {
    const SpectralPlan plan(16, 16);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ScalarField2D f = oracle::random_field(16, 16, 100 + s);
        const ScalarField2D g = oracle::random_field(16, 16, 200 + s);
        const double fg = dot(plan.apply_halfnorm(f), g);
        const double gf = dot(f, plan.apply_halfnorm(g));
        EXPECT_LE(std::abs(fg - gf) / std::max(std::abs(fg), 1e-300), 1e-10);
        EXPECT_GE(dot(f, plan.apply_halfnorm(f)), -1e-12);
    }
}

TEST(HalfnormProperties, TranslationEquivariant) {
    const SpectralPlan plan(16, 12);
    const ScalarField2D f = oracle::random_field(16, 12, 7);
    for (auto [dx, dy] : {std::pair{1, 0}, std::pair{3, 5}, std::pair{-7, 2}}) {
        const ScalarField2D lhs = plan.apply_halfnorm(cyclic_shift(f, dx, dy));
        const ScalarField2D rhs = cyclic_shift(plan.apply_halfnorm(f), dx, dy);
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-10);
    }
}

TEST(SpectralPlan, ConcurrentUseOfOnePlan) {
    const SpectralPlan plan(32, 32);
    const ScalarField2D f = oracle::random_field(32, 32, 8);
    const ScalarField2D expected = plan.apply_halfnorm(f);
    std::vector<ScalarField2D> results(4);
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] {
            for (int k = 0; k < 20; ++k) results[t] = plan.apply_halfnorm(f);
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& r : results) EXPECT_EQ(r, expected);
}

TEST(QuadraticForm, MatchesNaiveSpectrumAndOperator) {
    const SpectralPlan plan(12, 10);
    const ScalarField2D f = oracle::random_field(12, 10, 31);
    const auto spectrum = oracle::naive_dft(f);
    const ScalarField2D& k = plan.k_mag();
    double expected = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) expected += k[i] * std::norm(spectrum[i]);
    expected /= 120.0;
    EXPECT_NEAR(plan.quadratic_form(f), expected, 1e-12 * expected);
    EXPECT_NEAR(plan.quadratic_form(f), dot(f, plan.apply_halfnorm(f)), 1e-12 * expected);
    EXPECT_THROW(plan.quadratic_form(ScalarField2D(10, 12)), std::invalid_argument);
}
