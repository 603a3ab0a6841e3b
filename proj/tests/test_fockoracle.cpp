#include <cmath>

#include <gtest/gtest.h>

#include "qrt/fockoracle.hpp"

using namespace qrt;

TEST(Monomial, Examples) {
    std::vector<cplx> z1 = {cplx(1.0, 1.0)}, z2 = {2.0, cplx(0.0, 3.0)}, z0 = {cplx(0.3, -2.0), 5.0};
    EXPECT_EQ(monomial_eval({0, 0}, z0), cplx(1.0));
    EXPECT_NEAR(std::abs(monomial_eval({2}, z1) - cplx(0.0, std::sqrt(2.0))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(monomial_eval({1, 1}, z2) - cplx(0.0, 6.0)), 0.0, 1e-15);
}

TEST(Basis, EnumerationOrderAndSize) {
    auto b = enumerate_basis(3, 2);
    ASSERT_EQ(b.size(), 10u);
    EXPECT_EQ(b[0], (BasisIndex{0, 0, 0}));
    EXPECT_EQ(b[1], (BasisIndex{1, 0, 0}));
    EXPECT_EQ(b[3], (BasisIndex{0, 0, 1}));
    EXPECT_EQ(b[4], (BasisIndex{2, 0, 0}));
    EXPECT_THROW(enumerate_basis(6, 12, 1000), ResourceError);
}

TEST(Basis, DegreeProfile) {
    EXPECT_EQ(degree_profile({1, 2, 3}, Partition::parse("2,1")), (std::vector<int>{3, 3}));
    EXPECT_THROW(degree_profile({1, 2}, Partition::parse("2,1")), ArityError);
}

TEST(Toeplitz, IdentityEntries) {
    FockSymbol one = [](std::span<const cplx>) { return cplx(1.0); };
    auto n = Partition::parse("2,1");
    auto d = toeplitz_entry(one, n, {1, 0, 1}, {1, 0, 1}, 200'000, 3);
    auto o = toeplitz_entry(one, n, {1, 0, 1}, {0, 1, 1}, 200'000, 4);
    EXPECT_LE(std::abs(d.mean - 1.0), 4.0 * d.std_error);
    EXPECT_LE(std::abs(o.mean), 4.0 * o.std_error);
}

TEST(Toeplitz, CappedSquareDiagonal) {
    QuasiRadialSymbol sq(sym::power(0, 2.0, 1e6), 1);
    auto phi = fock_symbol(sq, Partition::ones(1));
    for (int m = 0; m < 3; ++m) {
        auto e = toeplitz_entry(phi, Partition::ones(1), {m}, {m}, 400'000, 10 + m);
        EXPECT_LE(std::abs(e.mean - static_cast<double>(m + 1)), 4.0 * e.std_error) << m;
    }
}

TEST(Toeplitz, TooFewSamples) {
    FockSymbol one = [](std::span<const cplx>) { return cplx(1.0); };
    EXPECT_THROW(toeplitz_entry(one, Partition::ones(1), {0}, {0}, 5000, 1), ParameterError);
}

TEST(Diagonalization, ConstantSymbol) {
    FockSymbol one = [](std::span<const cplx>) { return cplx(1.0); };
    auto r = diagonalization_report(one, Partition::parse("2,1"), 2, 20'000, 1);
    EXPECT_EQ(r.basis_size, 10u);
    EXPECT_LE(r.max_offdiag_ratio, 4.0);
    EXPECT_LE(r.max_spread_ratio(), 4.0);
}

TEST(Diagonalization, BoxSymbolMatchesEigenvalues) {
    QuasiRadialSymbol box(sym::indicator({0.0, 0.0}, {1.0, 1.0}), 2);
    auto n = Partition::parse("2,1");
    auto r = diagonalization_report(fock_symbol(box, n), n, 2, 200'000, 2, &box);
    EXPECT_LE(r.max_offdiag_ratio, 4.0);
    EXPECT_LE(r.max_spread_ratio(), 4.0);
    EXPECT_LE(r.max_gamma_ratio(), 4.0);
}

TEST(Diagonalization, RealPartIsFlagged) {
    FockSymbol re = [](std::span<const cplx> z) { return cplx(z[0].real(), 0.0); };
    auto n = Partition::parse("2,1");
    auto e = toeplitz_entry(re, n, {1, 0, 0}, {0, 0, 0}, 200'000, 5);
    EXPECT_LE(std::abs(e.mean - 0.5), 4.0 * e.std_error);
    auto r = diagonalization_report(re, n, 1, 200'000, 5);
    EXPECT_GT(r.max_offdiag_ratio, 6.0);
}

TEST(Sphere, Norms) {
    EXPECT_NEAR(sphere_monomial_norm_exact({0}, 1), 2.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(sphere_monomial_norm_exact({1}, 1), 2.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(sphere_monomial_norm_exact({1, 0}, 2), std::numbers::pi * std::numbers::pi, 1e-13);
    auto e = sphere_monomial_norm({1, 0}, 2, 200'000, 8);
    EXPECT_LE(std::abs(e.mean.real() - std::numbers::pi * std::numbers::pi), 4.0 * e.std_error);
}
