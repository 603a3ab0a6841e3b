#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "qrt/spectrum.hpp"

using namespace qrt;

TEST(Eigenvalue, Constant) {
    QuasiRadialSymbol one(sym::constant(1.0), 2);
    EXPECT_NEAR(eigenvalue(one, Partition::parse("3,2"), {17, 4}).real(), 1.0, 1e-14);
}

TEST(Eigenvalue, CappedSquare) {
    QuasiRadialSymbol sq(sym::power(0, 2.0, 1e6), 1);
    EXPECT_NEAR(eigenvalue(sq, Partition::ones(1), {3}).real(), 4.0, 1e-12);
}

TEST(Eigenvalue, BoxProduct) {
    QuasiRadialSymbol box(sym::indicator({0.0, 0.0}, {1.0, 1.0}), 2);
    const double e = std::exp(-1.0);
    EXPECT_NEAR(eigenvalue(box, Partition::parse("2,1"), {0, 0}).real(), (1.0 - 2.0 * e) * (1.0 - e), 1e-13);
}

TEST(Eigenvalue, IncompleteGamma) {
    QuasiRadialSymbol box(sym::indicator({0.0}, {1.0}), 1);
    EXPECT_NEAR(eigenvalue(box, Partition::parse("3"), {0}).real(), 0.0803013970713942, 1e-13);
    for (std::int64_t m : {0, 1, 5, 50, 300})
        EXPECT_NEAR(eigenvalue(box, Partition::ones(1), {m}).real(), boost::math::gamma_p(m + 1.0, 1.0), 1e-10);
}

TEST(Eigenvalue, ShiftIdentityIsExact) {
    QuasiRadialSymbol a(sym::sum({{0.5, sym::cos_of(0, 2.0)}, {cplx(0.0, 0.5), sym::sin_of(1, 0.7)}}), 2);
    for (std::int64_t m : {0, 3, 40}) {
        auto lhs = eigenvalue(a, Partition::parse("3,2"), {m, 7});
        auto rhs = eigenvalue(a, Partition::ones(2), {m + 2, 8});
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(Eigenvalue, ProductFactorization) {
    QuasiRadialSymbol a(sym::product({sym::gauss(0, 0.4), sym::indicator({1.5}, {4.0}, {1})}), 2);
    QuasiRadialSymbol a1(sym::gauss(0, 0.4), 1), a2(sym::indicator({1.5}, {4.0}), 1);
    auto lhs = eigenvalue(a, Partition::ones(2), {4, 9}, default_order, QuadMode::adaptive);
    auto rhs = eigenvalue(a1, Partition::ones(1), {4}, default_order, QuadMode::adaptive) *
               eigenvalue(a2, Partition::ones(1), {9}, default_order, QuadMode::adaptive);
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::abs(rhs));
}

TEST(Eigenvalue, ArityMismatch) {
    QuasiRadialSymbol box(sym::indicator({0.0, 0.0}, {1.0, 1.0}), 2);
    EXPECT_THROW(eigenvalue(box, Partition::ones(1), {0}), ArityError);
}

TEST(EigenTable, AllOnes) {
    QuasiRadialSymbol one(sym::constant(1.0), 2);
    auto t = eigen_table(one, Partition::parse("2,1"), {5, 5});
    ASSERT_EQ(t.size(), 36u);
    for (auto v : t.values) EXPECT_NEAR(v.real(), 1.0, 1e-14);
}

TEST(EigenTable, CellCap) {
    QuasiRadialSymbol one(sym::constant(1.0), 2);
    EXPECT_THROW(eigen_table(one, Partition::ones(2), {5000, 5000}), ResourceError);
}

TEST(EigenTable, Csv) {
    QuasiRadialSymbol one(sym::constant(1.0), 1);
    auto csv = to_csv(eigen_table(one, Partition::ones(1), {1}));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "m_1,gamma_re,gamma_im,err");
    EXPECT_NE(csv.find("\n1,1,0,"), std::string::npos);
}

TEST(Kernel, Examples) {
    EXPECT_EQ(kernel_l1_distance(4, 4), 0.0);
    EXPECT_NEAR(kernel_l1_distance(1, 0), 0.7357588823428847, 1e-13);
}

TEST(Kernel, AdjacentClosedForm) {
    for (std::int64_t m : {1, 2, 7, 50, 999, 10000}) {
        double closed = 2.0 * std::exp(m * std::log(static_cast<double>(m)) - m - std::lgamma(m + 1.0));
        EXPECT_NEAR(kernel_l1_adjacent(m), closed, 1e-12);
        EXPECT_NEAR(kernel_l1_distance(m, m - 1), closed, 1e-10);
        EXPECT_LE(closed, std::sqrt(2.0 / (std::numbers::pi * m)));
    }
}

TEST(Kernel, Telescoping) {
    for (auto [a, b] : {std::pair<std::int64_t, std::int64_t>{0, 5}, {3, 40}, {100, 130}, {900, 1000}})
        EXPECT_LE(kernel_l1_distance(a, b), kernel_l1_telescoping(a, b) + 1e-12);
}

TEST(Lipschitz, ConstantHasZeroRatio) {
    QuasiRadialSymbol one(sym::constant(1.0), 1);
    auto c = lipschitz_certificate(eigen_table(one, Partition::ones(1), {100}));
    EXPECT_EQ(c.max_ratio, 0.0);
}

TEST(Lipschitz, BoxBelowBound) {
    QuasiRadialSymbol box(sym::indicator({0.0}, {1.0}), 1);
    auto t = eigen_table(box, Partition::ones(1), {200});
    auto c = lipschitz_certificate(t);
    auto ex = lipschitz_certificate_exhaustive(t);
    EXPECT_LE(c.max_ratio, 1.5957692);
    EXPECT_GT(c.max_ratio, 0.0);
    EXPECT_NEAR(c.max_ratio, ex.max_ratio, 1e-12);
}
