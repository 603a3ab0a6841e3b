#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qrt/density.hpp"

using namespace qrt;

namespace {

// Independent high-precision quadrature values of the kernel gap.
const std::pair<std::int64_t, double> frozen_gap[] = {
    {0, 0.78549681364961371},     {1, 0.45398851105575091},      {10, 0.16625452067642121},
    {100, 0.053129937631659157},  {1000, 0.016818909553725396},  {10000, 0.0053191679788776872},
};

const std::vector<GridAxis> axis40 = {GridAxis::symmetric(40.0, 4096)};

}  // namespace

TEST(Gap, FrozenValues) {
    for (auto [m, v] : frozen_gap) EXPECT_NEAR(kernel_l1_gap(m), v, 1e-9 * v) << m;
}

TEST(Gap, StrictlyDecreasing) {
    double g1 = kernel_l1_gap(1), g10 = kernel_l1_gap(10), g100 = kernel_l1_gap(100), g1000 = kernel_l1_gap(1000);
    EXPECT_GT(g1, g10);
    EXPECT_GT(g10, g100);
    EXPECT_GT(g100, g1000);
    EXPECT_LT(kernel_l1_gap(10000), g1 / 5.0);
}

TEST(Kernels, UnitMass) {
    double acc = 0.0, h = 1e-3;
    for (int i = -8000; i <= 8000; ++i) acc += kernel_h(i * h) * h;
    EXPECT_NEAR(acc, 1.0, 1e-12);
}

TEST(Convolution, ConstantIsFixed) {
    auto one = GridFunction::sample(axis40, [](std::span<const double>) { return cplx(1.0); }, 1.0);
    std::vector<std::vector<double>> pts = {{-12.0}, {0.0}, {5.5}};
    for (auto v : convolve_H(one, pts)) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-10);
}

TEST(Convolution, GaussianSelfProduct) {
    auto h = GridFunction::sample(axis40, [](std::span<const double> x) { return cplx(kernel_h(x[0])); });
    std::vector<std::vector<double>> zero = {{0.0}};
    EXPECT_NEAR(convolve_H(h, zero)[0].real(), 0.5641895835477563, 1e-10);
}

TEST(Convolution, CoverageError) {
    auto one = GridFunction::sample(axis40, [](std::span<const double>) { return cplx(1.0); });
    std::vector<std::vector<double>> edge = {{38.5}};
    EXPECT_THROW(convolve_H(one, edge), CoverageError);
}

TEST(Transform, RoundTrip) {
    auto g = GridFunction::sample(axis40, [](std::span<const double> x) { return cplx(std::cos(x[0]), std::exp(-x[0] * x[0])); });
    auto back = dft_inverse(g, dft_forward(g));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(back.values[i] - g.values[i]), 0.0, 1e-12);
}

TEST(Transform, Multiplier) {
    std::vector<double> z0 = {0.0};
    EXPECT_NEAR(deconvolution_multiplier(z0, 0.5), 1.0, 1e-15);
    std::vector<double> far = {10.0};
    EXPECT_EQ(deconvolution_multiplier(far, 0.5), 0.0);
}

TEST(Deconvolution, ConstantTarget) {
    const cplx c(0.7, -0.2);
    auto target = GridFunction::sample(axis40, [&](std::span<const double>) { return c; }, c);
    auto b = deconvolve_bump(target, 0.5);
    std::vector<std::vector<double>> pts;
    for (double x = -20.0; x <= 20.0; x += 1.0) pts.push_back({x});
    for (auto v : convolve_H(b, pts)) EXPECT_LE(std::abs(v - c), 1e-8);
}

TEST(Deconvolution, NarrowerBumpIsCloser) {
    auto sine = GridFunction::sample(axis40, [](std::span<const double> x) { return cplx(std::sin(x[0])); });
    std::vector<std::vector<double>> pts;
    for (double x = -20.0; x <= 20.0; x += 0.25) pts.push_back({x});
    auto err = [&](double t0) {
        auto conv = convolve_H(deconvolve_bump(sine, t0), pts);
        double e = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) e = std::max(e, std::abs(conv[i] - std::sin(pts[i][0])));
        return e;
    };
    EXPECT_LT(err(0.5), err(1.0));
}

TEST(Deconvolution, ZeroWidthRejected) {
    auto sine = GridFunction::sample(axis40, [](std::span<const double> x) { return cplx(std::sin(x[0])); });
    EXPECT_THROW(deconvolve_bump(sine, 0.0), ParameterError);
}

TEST(Synthesis, ConstantTarget) {
    auto r = synthesize_symbol(LatticeFunction::closed(sym::constant(0.5)), Partition::ones(1), 1e-6, {100});
    EXPECT_EQ(r.report.sup_residual, 0.0);
    std::vector<double> s = {3.0};
    EXPECT_EQ(r.symbol(s), cplx(0.5));
}

TEST(Synthesis, ArityThreeUnsupported) {
    auto sigma = LatticeFunction::closed(sym::constant(1.0), 3);
    EXPECT_THROW(synthesize_symbol(sigma, Partition::ones(3), 0.1, {5, 5, 5}), UnsupportedError);
}

TEST(Synthesis, SinSqrtMatchesFixture) {
    auto r = synthesize_symbol(LatticeFunction::closed(sym::sin_of(0, 1.0)), Partition::ones(1), 0.1, {400});
    EXPECT_LT(r.report.sup_residual, 0.1);
    EXPECT_FALSE(r.report.target_missed());

    std::ifstream in(QRT_FIXTURES "/sin_sqrt_residuals.csv");
    ASSERT_TRUE(in.good());
    std::string line;
    std::getline(in, line);
    std::size_t i = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string m, v;
        std::getline(ss, m, ',');
        std::getline(ss, v, ',');
        ASSERT_LT(i, r.report.residuals.size());
        EXPECT_EQ(r.report.residuals[i].first[0], std::stoll(m));
        EXPECT_NEAR(r.report.residuals[i].second, std::stod(v), 1e-9) << m;
        ++i;
    }
    EXPECT_EQ(i, r.report.residuals.size());
}

TEST(Synthesis, ShiftReduction) {
    auto target = LatticeFunction::closed(sym::sum({{0.6, sym::sin_of(0, 1.0)}, {0.3, sym::cos_of(0, 0.4)}}));
    auto r3 = synthesize_symbol(target, Partition::parse("3"), 0.1, {60});
    auto r1 = synthesize_symbol(shift_right(target, {2}), Partition::ones(1), 0.1, {62});
    for (std::size_t i = 0; i < r3.report.residuals.size(); ++i)
        EXPECT_NEAR(r3.report.residuals[i].second, r1.report.residuals[i + 2].second, 1e-9);
}
