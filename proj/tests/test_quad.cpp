#include <cmath>

#include <gtest/gtest.h>

#include "qrt/quad.hpp"

using namespace qrt;

TEST(Laguerre, OrderOne) {
    auto r = laguerre_rule(0.0, 1);
    ASSERT_EQ(r.nodes.size(), 1u);
    EXPECT_NEAR(r.nodes[0], 1.0, 1e-14);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-14);
}

TEST(Laguerre, OrderTwo) {
    auto r = laguerre_rule(0.0, 2);
    const double s = std::sqrt(2.0);
    EXPECT_NEAR(r.nodes[0], 2.0 - s, 1e-14);
    EXPECT_NEAR(r.nodes[1], 2.0 + s, 1e-14);
    EXPECT_NEAR(r.weights[0], (2.0 + s) / 4.0, 1e-14);
    EXPECT_NEAR(r.weights[1], (2.0 - s) / 4.0, 1e-14);
}

TEST(Laguerre, WeightsNormalized) {
    for (double alpha : {0.0, 0.5, 7.0, 120.0, 2000.0})
        for (int q : {1, 3, 40, 80, 200}) {
            auto r = laguerre_rule(alpha, q);
            double s = 0.0;
            for (double w : r.weights) s += w;
            EXPECT_NEAR(s, 1.0, 1e-12) << alpha << " " << q;
        }
}

TEST(Laguerre, NegativeAlphaRejected) { EXPECT_THROW(laguerre_rule(-0.5, 4), ParameterError); }

TEST(GammaExpectation, Examples) {
    double shape4 = 4.0, shape1 = 1.0, shape7[] = {7.0, 2.5};
    QuasiRadialSymbol one(sym::constant(1.0), 2);
    EXPECT_NEAR(gamma_expectation(one, shape7).real(), 1.0, 1e-14);
    QuasiRadialSymbol sq(sym::power(0, 2.0, 1e6), 1);
    EXPECT_NEAR(gamma_expectation(sq, std::span<const double>(&shape4, 1)).real(), 4.0, 1e-12);
    QuasiRadialSymbol box(sym::indicator({0.0}, {1.0}), 1);
    EXPECT_NEAR(gamma_expectation(box, std::span<const double>(&shape1, 1)).real(), 1.0 - std::exp(-1.0), 1e-13);
}

TEST(GammaExpectation, SmoothModeRejectsIndicators) {
    double shape = 1.0;
    QuasiRadialSymbol box(sym::indicator({0.0}, {1.0}), 1);
    EXPECT_THROW(gamma_expectation(box, std::span<const double>(&shape, 1), default_order, QuadMode::smooth), ModeError);
}

TEST(GammaExpectation, ModesAgreeOnSmoothSymbols) {
    QuasiRadialSymbol a(sym::product({sym::sin_of(0, 1.3), sym::gauss(1, 0.2)}), 2);
    for (double s0 : {1.0, 5.0, 40.0}) {
        double shape[] = {s0, 3.0};
        auto aut = gamma_expectation_ex(a, shape);
        auto smooth = gamma_expectation_ex(a, shape, default_order, QuadMode::smooth);
        auto adaptive = gamma_expectation_ex(a, shape, default_order, QuadMode::adaptive);
        EXPECT_LE(std::abs(aut.value - adaptive.value), 1e-12) << s0;
        EXPECT_LE(std::abs(smooth.value - adaptive.value), smooth.error + adaptive.error) << s0;
    }
}

TEST(MonteCarlo, ConstantHasZeroError) {
    auto e = gaussian_mc([](std::span<const cplx>) { return cplx(1.0); }, 2, 10'000, 3);
    EXPECT_EQ(e.mean, cplx(1.0));
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(MonteCarlo, SecondMoment) {
    auto e = gaussian_mc([](std::span<const cplx> z) { return cplx(std::norm(z[0])); }, 1, 1'000'000, 11);
    EXPECT_LE(std::abs(e.mean - 1.0), 4.0 * e.std_error);
    EXPECT_GT(e.std_error, 0.0);
}

TEST(MonteCarlo, OddMomentVanishes) {
    auto e = gaussian_mc([](std::span<const cplx> z) { return z[0]; }, 1, 200'000, 5);
    EXPECT_LE(std::abs(e.mean), 4.0 * e.std_error);
}

TEST(MonteCarlo, TooFewSamples) {
    EXPECT_THROW(gaussian_mc([](std::span<const cplx>) { return cplx(1.0); }, 1, 999, 1), ParameterError);
}

TEST(MonteCarlo, SameSeedSameBits) {
    auto f = [](std::span<const cplx> z) { return z[0] * std::conj(z[1]); };
    auto a = gaussian_mc(f, 2, 50'000, 42), b = gaussian_mc(f, 2, 50'000, 42), c = gaussian_mc(f, 2, 50'000, 43);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_NE(a.mean, c.mean);
}

TEST(MonteCarlo, GammaSamplingMatchesQuadrature) {
    QuasiRadialSymbol a(sym::gauss(0, 0.4), 1);
    double shape = 6.0;
    auto q = gamma_expectation(a, std::span<const double>(&shape, 1));
    auto e = gamma_mc(a, std::span<const double>(&shape, 1), 400'000, 9);
    EXPECT_LE(std::abs(q - e.mean), 4.0 * e.std_error);
}
