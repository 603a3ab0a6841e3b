#include <cmath>

#include <gtest/gtest.h>

#include "qrt/extension.hpp"

using namespace qrt;

TEST(Coefficients, HandExpansion) {
    auto prod = LatticeFunction::table({3, 3}, {0, 0, 0, 0, 1, 2, 0, 2, 4}, 0.0);
    int s12[] = {1, 2}, s1[] = {1}, s2[] = {2};
    MultiIndex m = {0, 0};
    EXPECT_EQ(coeff(prod, m, s12), cplx(1.0));
    EXPECT_EQ(coeff(prod, m, s1), cplx(0.0));
    EXPECT_EQ(coeff(prod, m, s2), cplx(0.0));
}

TEST(Coefficients, DirectEqualsRecursive) {
    std::vector<cplx> v(27);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>((static_cast<int>(i) * 7) % 11 - 5);
    auto sigma = LatticeFunction::table({3, 3, 3}, v, 2.0);
    int subsets[][3] = {{1, 0, 0}, {2, 3, 0}, {1, 2, 3}};
    int sizes[] = {1, 2, 3};
    for (std::int64_t a = 0; a < 3; ++a)
        for (int s = 0; s < 3; ++s) {
            MultiIndex m = {a, 1, 2 - a};
            std::span<const int> sub(subsets[s], static_cast<std::size_t>(sizes[s]));
            EXPECT_EQ(coeff(sigma, m, sub), coeff_recursive(sigma, m, sub));
        }
}

TEST(Coefficients, BadSubset) {
    auto sigma = LatticeFunction::table({2, 2}, {0, 1, 2, 3}, 0.0);
    int bad[] = {3};
    MultiIndex m = {0, 0};
    EXPECT_THROW(coeff(sigma, m, bad), ParameterError);
}

TEST(Extension, Restriction) {
    auto sigma = LatticeFunction::closed(sym::product({sym::sin_of(0, 1.0), sym::cos_of(1, 2.0)}));
    for (std::int64_t a = 0; a < 6; ++a)
        for (std::int64_t b = 0; b < 6; ++b) {
            std::vector<double> x = {static_cast<double>(a), static_cast<double>(b)};
            EXPECT_EQ(extend_eval(sigma, x), sigma({a, b}));
        }
}

TEST(Extension, SqrtInterpolation) {
    auto step = LatticeFunction::table({2}, {0.0, 1.0}, 1.0);
    for (double x : {0.0, 0.04, 0.25, 0.81}) {
        std::vector<double> p = {x};
        EXPECT_NEAR(extend_eval(step, p).real(), std::sqrt(x), 1e-15);
    }
}

TEST(Extension, BoundaryConsistency) {
    auto sigma = LatticeFunction::table({3, 3}, {1, -2, 0.5, 3, 0, 1, 2, 2, -1}, 0.0);
    std::vector<double> x = {1.0, 0.37};
    EXPECT_NEAR(std::abs(extend_eval_in_cell(sigma, {0, 0}, x) - extend_eval_in_cell(sigma, {1, 0}, x)), 0.0, 1e-12);
}

TEST(BCoefficients, CornerAndMidpoint) {
    auto sigma = LatticeFunction::table({4}, {0, 0, 0, 0}, 0.0);
    auto b = b_coefficients(sigma, MultiIndex{2}, std::vector<double>{2.0});
    EXPECT_EQ(b[0], 1.0);
    EXPECT_EQ(b[1], 0.0);
    double mid = std::pow(0.5 * (std::sqrt(2.0) + std::sqrt(3.0)), 2);
    auto bm = b_coefficients(sigma, MultiIndex{2}, std::vector<double>{mid});
    EXPECT_NEAR(bm[0], 0.5, 1e-12);
    EXPECT_NEAR(bm[1], 0.5, 1e-12);
}

TEST(BCoefficients, PartitionOfUnity) {
    auto sigma = LatticeFunction::table({4, 4, 4}, std::vector<cplx>(64, 1.0), 0.0);
    for (double u : {0.1, 0.5, 0.93}) {
        std::vector<double> x = {1.0 + u, 2.0 + u * u, 0.5 * u};
        MultiIndex m = {1, 2, 0};
        auto b = b_coefficients(sigma, m, x);
        double s = 0.0;
        for (double v : b) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
        auto bp = b_coefficients_product(m, x);
        for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], bp[i], 1e-12);
    }
}

TEST(Constants, Ak) {
    EXPECT_EQ(extension_constant(1), 1.0);
    EXPECT_EQ(extension_constant(2), 6.0);
    EXPECT_EQ(extension_constant(3), 27.0);
}

TEST(ProductDifference, Bound) {
    std::vector<cplx> a = {cplx(0.3, 0.4), 0.9, cplx(0.0, -0.7)}, b = {0.5, cplx(0.6, 0.6), cplx(-0.2, 0.1)};
    auto [lhs, rhs] = product_difference(a, b);
    EXPECT_LE(lhs, rhs);
}
