#include <cmath>

#include <gtest/gtest.h>

#include "qrt/sqrtmetric.hpp"

using namespace qrt;

TEST(Rho, Examples) {
    EXPECT_EQ(rho({0, 0}, {1, 4}), 3.0);
    EXPECT_EQ(rho({5, 2}, {5, 2}), 0.0);
    EXPECT_EQ(rho({4}, {9}), 1.0);
    EXPECT_THROW(rho({1}, {1, 2}), ArityError);
}

TEST(Rho, LargeIndicesKeepPrecision) {
    std::int64_t big = 1'000'000'000'000;
    EXPECT_NEAR(sqrt_gap(big, big + 1), 0.5e-6, 1e-18);
}

TEST(Modulus, Examples) {
    EXPECT_EQ(modulus(LatticeFunction::closed(sym::constant(0.4)), 1.0, Window({100})), 0.0);
    EXPECT_EQ(modulus(LatticeFunction::indicator({{0}}), 1.0, Window({1})), 1.0);
    EXPECT_EQ(modulus(LatticeFunction::indicator({{0}}), 0.99, Window({1})), 0.0);
    EXPECT_LE(modulus(LatticeFunction::closed(sym::sin_of(0, 1.0)), 0.5, Window({10'000})), 0.5);
    EXPECT_THROW(modulus(LatticeFunction::indicator({{0}}), 0.0, Window({1})), ParameterError);
}

TEST(Modulus, BatchMatchesBruteForce) {
    std::vector<cplx> v = {0.3, -1.0, cplx(0.0, 0.5), 0.9, 0.1, -0.2, 0.7, 0.0, 0.4, 1.0, -0.6, 0.25};
    auto sigma = LatticeFunction::table({3, 4}, v, 0.2);
    Window w({5, 6});
    std::vector<double> deltas = {0.2, 0.5, 1.0, 2.5};
    auto batch = modulus_batch(sigma, deltas, w);
    ModulusProfile profile(sigma, w);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        double brute = 0.0;
        for (std::size_t a = 0; a < w.cells(); ++a)
            for (std::size_t b = 0; b < w.cells(); ++b) {
                auto ma = w.index(a), mb = w.index(b);
                if (rho(ma, mb) <= deltas[i]) brute = std::max(brute, std::abs(sigma(ma) - sigma(mb)));
            }
        EXPECT_EQ(batch[i], brute) << deltas[i];
        EXPECT_EQ(profile(deltas[i]), brute) << deltas[i];
    }
}

TEST(Shift, Examples) {
    auto s = LatticeFunction::closed(sym::sin_of(0, 1.0));
    EXPECT_EQ(shift_left(s, {2})({3}), s({5}));
    EXPECT_EQ(shift_right(s, {1})({0}), cplx(0.0));
    auto lr = shift_left(shift_right(s, {1}), {1});
    for (std::int64_t m = 0; m < 20; ++m) EXPECT_EQ(lr({m}), s({m}));
    EXPECT_THROW(shift_left(s, {-1}), ParameterError);
    EXPECT_THROW(shift_left(s, {1, 1}), ArityError);
}

TEST(Shift, LeftShiftDoesNotIncreaseModulus) {
    auto s = LatticeFunction::closed(sym::sum({{0.5, sym::sin_of(0, 3.0)}, {0.5, sym::cos_of(0, 1.0)}}));
    Window w({500});
    std::vector<double> deltas = {0.1, 0.3, 0.7, 1.5};
    for (std::int64_t k = 1; k <= 5; ++k) {
        MultiIndex shift = {k};
        auto lhs = modulus_batch(shift_left(s, shift), deltas, w);
        auto rhs = modulus_batch(s, deltas, w.enlarged(shift));
        for (std::size_t i = 0; i < deltas.size(); ++i) EXPECT_LE(lhs[i], rhs[i]);
    }
}
