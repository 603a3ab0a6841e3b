#pragma once

// Eigenvalue functions gamma_{n,a}(m), finite tables of them, Gamma-kernel
// L1 distances and the Lipschitz certificate in the square-root metric.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qrt/errors.hpp"
#include "qrt/parallel.hpp"
#include "qrt/quad.hpp"
#include "qrt/sqrtmetric.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

inline const double lipschitz_constant = 2.0 * std::sqrt(2.0 / std::numbers::pi);

namespace detail {

inline std::vector<double> shapes_for(const Partition& n, std::span<const std::int64_t> m) {
    if (m.size() != n.k()) throw ArityError("multi-index length does not match the partition");
    std::vector<double> shape(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] < 0) throw ParameterError("multi-index entries must be nonnegative");
        shape[j] = static_cast<double>(m[j] + n[j]);
    }
    return shape;
}

}  // namespace detail

inline GammaResult eigenvalue_ex(const QuasiRadialSymbol& a, const Partition& n, std::span<const std::int64_t> m,
                                 int order = default_order, QuadMode mode = QuadMode::automatic,
                                 detail::IntegralMemo* memo = nullptr) {
    if (!a.conforms(n.k()))
        throw ArityError("symbol arity " + std::to_string(a.arity()) + " does not match partition length " +
                         std::to_string(n.k()));
    auto shape = detail::shapes_for(n, m);
    return gamma_expectation_ex(a, shape, order, mode, memo);
}

/// gamma_{n,a}(m) = E[a(sqrt R)] with R_j ~ Gamma(m_j + n_j).
inline cplx eigenvalue(const QuasiRadialSymbol& a, const Partition& n, std::span<const std::int64_t> m,
                       int order = default_order, QuadMode mode = QuadMode::automatic) {
    return eigenvalue_ex(a, n, m, order, mode).value;
}

inline cplx eigenvalue(const QuasiRadialSymbol& a, const Partition& n, std::initializer_list<std::int64_t> m,
                       int order = default_order, QuadMode mode = QuadMode::automatic) {
    return eigenvalue(a, n, std::span<const std::int64_t>(m.begin(), m.size()), order, mode);
}

/// Values of gamma_{n,a} on the box [0, M_1] x ... x [0, M_k], row-major.
struct EigenTable {
    Partition partition{std::vector<int>{1}};
    std::string symbol;
    MultiIndex window;
    std::vector<cplx> values;
    std::vector<double> errors;

    std::size_t k() const noexcept { return window.size(); }
    std::size_t size() const noexcept { return values.size(); }
    std::size_t extent(std::size_t j) const { return static_cast<std::size_t>(window[j] + 1); }

    std::size_t flat(std::span<const std::int64_t> m) const {
        std::size_t f = 0;
        for (std::size_t j = 0; j < k(); ++j) {
            if (m[j] < 0 || m[j] > window[j]) throw ParameterError("multi-index outside the table window");
            f = f * extent(j) + static_cast<std::size_t>(m[j]);
        }
        return f;
    }
    MultiIndex index(std::size_t f) const {
        MultiIndex m(k());
        for (std::size_t j = k(); j-- > 0;) {
            m[j] = static_cast<std::int64_t>(f % extent(j));
            f /= extent(j);
        }
        return m;
    }
    cplx at(std::span<const std::int64_t> m) const { return values[flat(m)]; }
    cplx at(std::initializer_list<std::int64_t> m) const { return at(std::span<const std::int64_t>(m.begin(), m.size())); }
};

inline constexpr std::size_t default_cell_cap = 10'000'000;

inline std::size_t window_cells(const MultiIndex& window, std::size_t cap) {
    if (window.empty()) throw ParameterError("window needs at least one bound");
    std::size_t cells = 1;
    for (auto M : window) {
        if (M < 0) throw ParameterError("window bounds must be nonnegative");
        std::size_t e = static_cast<std::size_t>(M) + 1;
        if (cells > cap / e + 1) throw ResourceError("window exceeds the cell cap");
        cells *= e;
    }
    if (cells > cap)
        throw ResourceError("window has " + std::to_string(cells) + " cells, cap is " + std::to_string(cap));
    return cells;
}

inline EigenTable eigen_table(const QuasiRadialSymbol& a, const Partition& n, const MultiIndex& window,
                              int order = default_order, QuadMode mode = QuadMode::automatic,
                              std::size_t cell_cap = default_cell_cap) {
    if (window.size() != n.k()) throw ArityError("window length does not match the partition");
    if (!a.conforms(n.k())) throw ArityError("symbol arity does not match the partition");
    EigenTable t;
    t.partition = n;
    t.symbol = serialize_symbol(a);
    t.window = window;
    const std::size_t cells = window_cells(window, cell_cap);
    t.values.resize(cells);
    t.errors.resize(cells);
    detail::IntegralMemo memo;
    parallel_for(cells, [&](std::size_t f) {
        auto m = t.index(f);
        auto r = eigenvalue_ex(a, n, m, order, mode, &memo);
        t.values[f] = r.value;
        t.errors[f] = r.error;
    });
    return t;
}

inline std::string to_csv(const EigenTable& t) {
    std::string out;
    for (std::size_t j = 0; j < t.k(); ++j) out += "m_" + std::to_string(j + 1) + ",";
    out += "gamma_re,gamma_im,err\n";
    char buf[128];
    for (std::size_t f = 0; f < t.size(); ++f) {
        auto m = t.index(f);
        for (auto v : m) {
            std::snprintf(buf, sizeof buf, "%" PRId64 ",", v);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t.values[f].real(), t.values[f].imag(), t.errors[f]);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gamma kernel distances K(m, r) = r^m e^{-r} / m!
// ---------------------------------------------------------------------------

inline double gamma_kernel(std::int64_t m, double r) {
    if (r <= 0.0) return m == 0 ? 1.0 : 0.0;
    if (m == 0) return std::exp(-r);
    // Relative to the mode r = m so the exponent carries no cancellation noise.
    const double x = static_cast<double>(m), d = r - x;
    return std::exp(x * std::log(x) - x - std::lgamma(x + 1.0) + x * std::log1p(d / x) - d);
}

/// 2 m^m e^{-m} / m!, the distance between K(m-1, .) and K(m, .).
inline double kernel_l1_adjacent(std::int64_t m) {
    if (m <= 0) throw ParameterError("adjacent kernel distance needs m >= 1");
    double x = static_cast<double>(m);
    return 2.0 * std::exp(x * std::log(x) - x - std::lgamma(x + 1.0));
}

/// Sum of adjacent distances between min(m, m') and max(m, m').
inline double kernel_l1_telescoping(std::int64_t m, std::int64_t mp) {
    if (m > mp) std::swap(m, mp);
    double acc = 0.0;
    for (std::int64_t j = m + 1; j <= mp; ++j) acc += kernel_l1_adjacent(j);
    return acc;
}

/// Point where K(m, .) and K(m', .) cross, m < m'.
inline double kernel_crossing(std::int64_t m, std::int64_t mp) {
    double a = static_cast<double>(m), b = static_cast<double>(mp);
    return std::exp((std::lgamma(b + 1.0) - std::lgamma(a + 1.0)) / (b - a));
}

/// int_0^inf |K(m, r) - K(m', r)| dr by adaptive quadrature split at the crossing.
inline double kernel_l1_distance(std::int64_t m, std::int64_t mp) {
    if (m < 0 || mp < 0) throw ParameterError("kernel indices must be nonnegative");
    if (m == mp) return 0.0;
    if (m > mp) std::swap(m, mp);
    const double cross = kernel_crossing(m, mp);
    const double lo_mean = static_cast<double>(m) + 1.0, hi_mean = static_cast<double>(mp) + 1.0;
    const double lo = std::max(0.0, lo_mean - 12.0 * std::sqrt(lo_mean) - 30.0);
    const double hi = hi_mean + 12.0 * std::sqrt(hi_mean) + 30.0;
    auto f = [&](double r) { return std::abs(gamma_kernel(m, r) - gamma_kernel(mp, r)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    const double cuts[] = {lo, std::clamp(cross, lo, hi), hi};
    for (int i = 0; i < 2; ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        // Split further so each piece spans a few kernel widths.
        double width = std::max(1.0, std::sqrt(lo_mean));
        int pieces = std::max(1, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / (4.0 * width))));
        for (int p = 0; p < pieces; ++p) {
            double a = cuts[i] + (cuts[i + 1] - cuts[i]) * p / pieces;
            double b = p + 1 == pieces ? cuts[i + 1] : cuts[i] + (cuts[i + 1] - cuts[i]) * (p + 1) / pieces;
            total += GK::integrate(f, a, b, 15, 1e-12);
        }
    }
    return total;
}

/// int int |K(m1,r1)K(m2,r2) - K(m1',r1)K(m2',r2)| dr1 dr2; the inner
/// integral is resolved at its single sign change.
inline double product_kernel_l1_distance(std::span<const std::int64_t> m, std::span<const std::int64_t> mp) {
    if (m.size() != 2 || mp.size() != 2) throw ArityError("product kernel distance is implemented for k = 2");
    const std::int64_t a1 = m[0], c1 = mp[0], b2 = m[1], d2 = mp[1];
    auto inner = [&](double x, double y) {
        // int |x K(b2, r) - y K(d2, r)| dr
        if (b2 == d2) return std::abs(x - y);
        if (x == 0.0 || y == 0.0) return std::abs(x) + std::abs(y);
        std::int64_t lo = std::min(b2, d2), hi = std::max(b2, d2);
        double wl = b2 < d2 ? x : y, wh = b2 < d2 ? y : x;
        // wl K(lo, r) = wh K(hi, r)  <=>  r^(hi-lo) = (wl/wh) hi!/lo!
        double lr = (std::log(wl / wh) + std::lgamma(hi + 1.0) - std::lgamma(lo + 1.0)) / static_cast<double>(hi - lo);
        double r = std::exp(lr);
        double pl = boost::math::gamma_p(static_cast<double>(lo) + 1.0, r);
        double ph = boost::math::gamma_p(static_cast<double>(hi) + 1.0, r);
        return std::abs(wl * pl - wh * ph) + std::abs(wl * (1.0 - pl) - wh * (1.0 - ph));
    };
    auto f = [&](double r1) { return inner(gamma_kernel(a1, r1), gamma_kernel(c1, r1)); };
    const double top = static_cast<double>(std::max(a1, c1)) + 1.0;
    const double bottom = static_cast<double>(std::min(a1, c1)) + 1.0;
    const double lo = std::max(0.0, bottom - 12.0 * std::sqrt(bottom) - 30.0);
    const double hi = top + 12.0 * std::sqrt(top) + 30.0;
    std::vector<double> cuts{lo, hi};
    if (a1 != c1) cuts.insert(cuts.begin() + 1, std::clamp(kernel_crossing(std::min(a1, c1), std::max(a1, c1)), lo, hi));
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i] < cuts[i + 1]) total += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12);
    return total;
}

// ---------------------------------------------------------------------------
// Lipschitz certificate
// ---------------------------------------------------------------------------

struct LipschitzCertificate {
    double max_ratio = 0.0;
    MultiIndex witness_a, witness_b;
};

/// max |gamma(m) - gamma(m')| / rho(m, m') over distinct window pairs.
/// Any pair is joined by a coordinate-monotone path of unit steps whose rho
/// lengths add up to rho(m, m'), so the maximum is attained on unit steps.
inline LipschitzCertificate lipschitz_certificate(const EigenTable& t) {
    if (t.size() < 2) throw ParameterError("Lipschitz certificate needs at least two table entries");
    LipschitzCertificate c;
    for (std::size_t f = 0; f < t.size(); ++f) {
        auto m = t.index(f);
        for (std::size_t j = 0; j < t.k(); ++j) {
            if (m[j] == t.window[j]) continue;
            auto mp = m;
            ++mp[j];
            double dr = std::sqrt(static_cast<double>(mp[j])) - std::sqrt(static_cast<double>(m[j]));
            double ratio = std::abs(t.values[f] - t.at(mp)) / dr;
            if (ratio > c.max_ratio || c.witness_a.empty()) {
                c.max_ratio = ratio;
                c.witness_a = m;
                c.witness_b = mp;
            }
        }
    }
    return c;
}

/// Same maximum by scanning every pair; quadratic in the window size.
inline LipschitzCertificate lipschitz_certificate_exhaustive(const EigenTable& t) {
    if (t.size() < 2) throw ParameterError("Lipschitz certificate needs at least two table entries");
    LipschitzCertificate c;
    for (std::size_t f = 0; f < t.size(); ++f) {
        auto m = t.index(f);
        for (std::size_t g = f + 1; g < t.size(); ++g) {
            auto mp = t.index(g);
            double ratio = std::abs(t.values[f] - t.values[g]) / rho(m, mp);
            if (ratio > c.max_ratio || c.witness_a.empty()) {
                c.max_ratio = ratio;
                c.witness_a = m;
                c.witness_b = mp;
            }
        }
    }
    return c;
}

}  // namespace qrt
