#pragma once

// Kernels g, h, H; convolution and bump deconvolution on uniform grids;
// synthesis of a symbol whose eigenvalue function approximates a target.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qrt/errors.hpp"
#include "qrt/extension.hpp"
#include "qrt/parallel.hpp"
#include "qrt/quad.hpp"
#include "qrt/spectrum.hpp"
#include "qrt/sqrtmetric.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

/// h(x) = sqrt(2/pi) e^{-2x^2}
inline double kernel_h(double x) { return std::sqrt(2.0 / std::numbers::pi) * std::exp(-2.0 * x * x); }

/// H(x) = prod_i h(x_i)
inline double kernel_H(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::pow(2.0 / std::numbers::pi, 0.5 * static_cast<double>(x.size())) * std::exp(-2.0 * r2);
}

/// g(m, r) = 2 r^{2m+1} e^{-r^2} / m!, evaluated in log space.
inline double kernel_g(std::int64_t m, double r) {
    if (r <= 0.0) return 0.0;
    double md = static_cast<double>(m);
    double r0 = std::sqrt(md + 0.5), d = r - r0;
    double peak = std::log(2.0) + (2.0 * md + 1.0) * std::log(r0) - r0 * r0 - std::lgamma(md + 1.0);
    return std::exp(peak + (2.0 * md + 1.0) * std::log1p(d / r0) - d * (r + r0));
}

/// int_0^inf |g(m, r) - h(sqrt m - r)| dr
inline double kernel_l1_gap(std::int64_t m) {
    if (m < 0) throw ParameterError("kernel_l1_gap needs m >= 0");
    const double c = std::sqrt(static_cast<double>(m));
    const double lo = std::max(0.0, c - 14.0), hi = c + 14.0;
    auto d = [&](double r) { return kernel_g(m, r) - kernel_h(c - r); };
    constexpr int scan = 4000;
    std::vector<double> cuts{lo};
    double prev_x = lo, prev = d(lo);
    for (int i = 1; i <= scan; ++i) {
        double x = lo + (hi - lo) * i / scan;
        double v = d(x);
        if ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0)) {
            double a = prev_x, b = x, fa = prev;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                double mid = 0.5 * (a + b);
                double fm = d(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            cuts.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev = v;
    }
    cuts.push_back(hi);
    auto f = [&](double r) { return std::abs(d(r)); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
    return total;
}

// ---------------------------------------------------------------------------
// Uniform grids
// ---------------------------------------------------------------------------

struct GridAxis {
    double x0 = 0.0;
    double h = 1.0;
    std::size_t n = 0;

    double at(std::size_t i) const noexcept { return x0 + h * static_cast<double>(i); }
    double last() const noexcept { return at(n - 1); }
    /// Symmetric axis of n points on [-L, L) with 0 on the grid (n even).
    static GridAxis symmetric(double L, std::size_t n) {
        if (!(L > 0.0) || n < 2 || n % 2 != 0) throw ParameterError("symmetric axis needs L > 0 and an even point count");
        return {-L, 2.0 * L / static_cast<double>(n), n};
    }
};

/// Sampled values on a tensor grid (row-major), `outside` beyond its extent.
struct GridFunction {
    std::vector<GridAxis> axes;
    std::vector<cplx> values;
    cplx outside = 0.0;

    std::size_t k() const noexcept { return axes.size(); }
    std::size_t size() const noexcept { return values.size(); }

    GridFunction() = default;
    GridFunction(std::vector<GridAxis> ax, cplx out = 0.0) : axes(std::move(ax)), outside(out) {
        if (axes.empty()) throw ParameterError("grid needs at least one axis");
        std::size_t count = 1;
        for (const auto& a : axes) {
            if (!(a.h > 0.0) || a.n == 0) throw ParameterError("grid spacing must be positive");
            count *= a.n;
        }
        values.assign(count, 0.0);
    }

    std::vector<double> point(std::size_t flat) const {
        std::vector<double> x(k());
        for (std::size_t j = k(); j-- > 0;) {
            x[j] = axes[j].at(flat % axes[j].n);
            flat /= axes[j].n;
        }
        return x;
    }

    template <class F>
    static GridFunction sample(std::vector<GridAxis> ax, F&& f, cplx out = 0.0) {
        GridFunction g(std::move(ax), out);
        parallel_for(chunking(g.size()).count(), [&](std::size_t c) {
            auto layout = chunking(g.size());
            for (std::size_t i = layout.begin(c); i < layout.end(c); ++i) {
                auto x = g.point(i);
                g.values[i] = f(std::span<const double>(x));
            }
        });
        return g;
    }
};

/// (H * b)(x) by the trapezoid rule on b's grid, with b = outside beyond it.
inline std::vector<cplx> convolve_H(const GridFunction& b, std::span<const std::vector<double>> points) {
    const std::size_t k = b.k();
    constexpr double reach = 3.0;
    for (const auto& x : points) {
        if (x.size() != k) throw ArityError("point dimension does not match the grid");
        for (std::size_t j = 0; j < k; ++j) {
            double below = b.axes[j].x0 - (x[j] - reach), above = (x[j] + reach) - b.axes[j].last();
            double deficit = std::max(below, above);
            if (deficit > 1e-12)
                throw CoverageError("grid misses " + std::to_string(deficit) + " of the kernel support on axis " +
                                    std::to_string(j));
        }
    }
    const double cutoff = 6.5;
    std::vector<cplx> out(points.size());
    parallel_for(points.size(), [&](std::size_t p) {
        const auto& x = points[p];
        std::vector<std::size_t> lo(k), hi(k);
        std::vector<std::vector<double>> w(k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto& a = b.axes[j];
            double first = std::ceil((x[j] - cutoff - a.x0) / a.h), last = std::floor((x[j] + cutoff - a.x0) / a.h);
            lo[j] = static_cast<std::size_t>(std::max(0.0, first));
            hi[j] = static_cast<std::size_t>(std::min(static_cast<double>(a.n - 1), last));
            w[j].resize(hi[j] - lo[j] + 1);
            for (std::size_t i = lo[j]; i <= hi[j]; ++i) {
                double trap = (i == 0 || i + 1 == a.n) ? 0.5 : 1.0;
                w[j][i - lo[j]] = trap * a.h * kernel_h(x[j] - a.at(i));
            }
        }
        cplx acc = 0.0;
        double mass = 0.0;
        std::vector<std::size_t> idx(lo);
        while (true) {
            std::size_t flat = 0;
            double wt = 1.0;
            for (std::size_t j = 0; j < k; ++j) {
                flat = flat * b.axes[j].n + idx[j];
                wt *= w[j][idx[j] - lo[j]];
            }
            acc += wt * b.values[flat];
            mass += wt;
            std::size_t j = k;
            while (j > 0 && ++idx[j - 1] > hi[j - 1]) {
                idx[j - 1] = lo[j - 1];
                --j;
            }
            if (j == 0) break;
        }
        out[p] = acc + b.outside * (1.0 - mass);
    });
    return out;
}

/// (H * a)(x) in closed form for a grid symbol a on R_+^k, extended by zero
/// to the rest of R^k.
inline std::vector<cplx> convolve_H_symbol(const sym::Grid& g, std::span<const std::vector<double>> points) {
    const std::size_t d = g.dims();
    const double r2 = std::sqrt(2.0);
    std::vector<cplx> out(points.size());
    parallel_for(points.size(), [&](std::size_t p) {
        const auto& x = points[p];
        if (x.size() != d) throw ArityError("point dimension does not match the grid symbol");
        std::vector<std::vector<double>> cell(d);
        double inside = 1.0, half = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            const auto& e = g.edges[j];
            cell[j].resize(e.size() - 1);
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < e.size(); ++i) {
                double lo = std::max(e[i], 0.0), hi = std::max(e[i + 1], 0.0);
                double v = lo < hi ? 0.5 * (std::erf(r2 * (x[j] - lo)) - std::erf(r2 * (x[j] - hi))) : 0.0;
                cell[j][i] = v;
                s += v;
            }
            inside *= s;
            half *= 0.5 * std::erfc(-r2 * x[j]);
        }
        cplx acc = 0.0;
        std::vector<std::size_t> idx(d, 0);
        while (true) {
            std::size_t flat = 0;
            double w = 1.0;
            for (std::size_t j = 0; j < d; ++j) {
                flat = flat * cell[j].size() + idx[j];
                w *= cell[j][idx[j]];
            }
            acc += w * g.values[flat];
            std::size_t j = d;
            while (j > 0 && ++idx[j - 1] == cell[j - 1].size()) {
                idx[j - 1] = 0;
                --j;
            }
            if (j == 0) break;
        }
        out[p] = acc + g.outside * (half - inside);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Discrete Fourier transform, kernel e^{-i x.zeta}
// ---------------------------------------------------------------------------

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline void fftw_run(std::vector<cplx>& data, std::span<const std::size_t> dims, int sign) {
    std::vector<int> n(dims.begin(), dims.end());
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), ptr, ptr, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw Error("FFT planning failed");
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

inline std::vector<std::size_t> grid_dims(const GridFunction& g) {
    std::vector<std::size_t> dims;
    for (const auto& a : g.axes) dims.push_back(a.n);
    return dims;
}

/// Angular frequency of DFT bin i on an axis.
inline double frequency(const GridAxis& a, std::size_t i) {
    double signed_i = i < (a.n + 1) / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(a.n);
    return 2.0 * std::numbers::pi * signed_i / (static_cast<double>(a.n) * a.h);
}

}  // namespace detail

/// Forward transform of the grid samples (unnormalized, e^{-i} kernel).
inline std::vector<cplx> dft_forward(const GridFunction& g) {
    auto data = g.values;
    detail::fftw_run(data, detail::grid_dims(g), FFTW_FORWARD);
    return data;
}

/// Inverse of dft_forward, normalized by 1/N.
inline GridFunction dft_inverse(const GridFunction& shape, std::vector<cplx> spectrum) {
    detail::fftw_run(spectrum, detail::grid_dims(shape), FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(spectrum.size());
    GridFunction out = shape;
    for (std::size_t i = 0; i < spectrum.size(); ++i) out.values[i] = spectrum[i] * scale;
    return out;
}

/// Periodic convolution with the kernel whose transform is multiplier(zeta).
template <class M>
GridFunction apply_multiplier(const GridFunction& g, M&& multiplier) {
    auto spec = dft_forward(g);
    const std::size_t k = g.k();
    std::vector<double> zeta(k);
    for (std::size_t f = 0; f < spec.size(); ++f) {
        std::size_t rest = f;
        for (std::size_t j = k; j-- > 0;) {
            zeta[j] = detail::frequency(g.axes[j], rest % g.axes[j].n);
            rest /= g.axes[j].n;
        }
        spec[f] *= multiplier(std::span<const double>(zeta));
    }
    return dft_inverse(g, std::move(spec));
}

/// Bump e^{-1/(1-|zeta|^2)} on the open unit ball.
inline double bump(std::span<const double> zeta) {
    double r2 = 0.0;
    for (double z : zeta) r2 += z * z;
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

/// Transform of H: e^{-|zeta|^2 / 8}.
inline double transform_H(std::span<const double> zeta) {
    double r2 = 0.0;
    for (double z : zeta) r2 += z * z;
    return std::exp(-r2 / 8.0);
}

/// Transform of the unit-mass approximate identity h_t: bump(t zeta) / bump(0).
inline double transform_ht(std::span<const double> zeta, double t) {
    double r2 = 0.0;
    for (double z : zeta) r2 += t * t * z * z;
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

/// l-hat(zeta) = bump(t0 zeta) e^{|zeta|^2/8} / bump(0), so that H * (l * g) = h_t0 * g.
inline double deconvolution_multiplier(std::span<const double> zeta, double t0) {
    double r2 = 0.0;
    for (double z : zeta) r2 += z * z;
    double u = t0 * t0 * r2;
    return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u) + r2 / 8.0) : 0.0;
}

inline void check_deconvolution_grid(const GridFunction& g, double t0) {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw ParameterError("t0 must be positive");
    for (const auto& a : g.axes)
        if (a.h > std::numbers::pi * t0 / 4.0)
            throw ParameterError("grid spacing " + std::to_string(a.h) + " does not resolve frequencies up to 1/t0");
}

/// b = l * target with l-hat as above.
inline GridFunction deconvolve_bump(const GridFunction& target, double t0) {
    check_deconvolution_grid(target, t0);
    auto b = apply_multiplier(target, [&](std::span<const double> z) { return deconvolution_multiplier(z, t0); });
    b.outside = target.outside;
    return b;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

struct SynthesisParams {
    double t0 = 0.5;
    double L = 40.0;
    std::size_t grid_n = 0;  // 0: 4096 at k = 1, 512 at k = 2
    double lambda = 1e-6;
    std::size_t bins = 64;
    std::int64_t head_n = -1;  // -1: largest window bound
    int order = default_order;
};

struct SynthesisReport {
    MultiIndex window;
    Partition partition{std::vector<int>{1}};
    SynthesisParams params;
    double epsilon = 0.0;
    double head_radius = 0.0;
    std::vector<std::pair<MultiIndex, double>> residuals;
    double sup_residual = 0.0;
    std::vector<std::string> flags;

    bool target_missed() const { return std::find(flags.begin(), flags.end(), "target missed") != flags.end(); }

    json to_json() const {
        json res = json::array();
        for (const auto& [m, v] : residuals) res.push_back({{"m", m}, {"value", v}});
        json parts = json::array();
        for (int p : partition.parts()) parts.push_back(p);
        return {{"params",
                 {{"t0", params.t0},
                  {"L", params.L},
                  {"grid_n", params.grid_n},
                  {"lambda", params.lambda},
                  {"bins", params.bins},
                  {"head_n", params.head_n},
                  {"head_radius", head_radius},
                  {"order", params.order},
                  {"epsilon", epsilon},
                  {"partition", parts}}},
                {"window", window},
                {"residuals", res},
                {"sup_residual", sup_residual},
                {"flags", flags}};
    }
};

struct SynthesisResult {
    QuasiRadialSymbol symbol;
    SynthesisReport report;
};

namespace detail {

/// Deconvolved tail b for sigma restricted to s >= 0, as a grid symbol.
inline sym::NodePtr tail_symbol(const LatticeFunction& sigma, const SynthesisParams& p) {
    const std::size_t k = sigma.arity();
    std::vector<GridAxis> axes(k, GridAxis::symmetric(p.L, p.grid_n));
    GridFunction target(axes);
    check_deconvolution_grid(target, p.t0);
    const std::size_t rows = target.size() / axes.back().n;
    parallel_for(rows, [&](std::size_t r) {
        Extension f(sigma);
        std::vector<double> sq(k);
        for (std::size_t i = 0; i < axes.back().n; ++i) {
            std::size_t flat = r * axes.back().n + i;
            auto x = target.point(flat);
            for (std::size_t j = 0; j < k; ++j) sq[j] = x[j] * x[j];
            target.values[flat] = f(sq);
        }
    });
    auto b = deconvolve_bump(target, p.t0);

    // Cell i is centred on the grid point i h >= 0.
    const std::size_t half = p.grid_n / 2;
    const double h = axes[0].h;
    std::vector<double> edges(half + 1);
    edges[0] = 0.0;
    for (std::size_t i = 1; i <= half; ++i) edges[i] = (static_cast<double>(i) - 0.5) * h;
    const std::size_t cells_per_axis = half;
    std::vector<cplx> values;
    values.reserve(static_cast<std::size_t>(std::pow(cells_per_axis, k)));
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        std::size_t flat = 0;
        for (std::size_t j = 0; j < k; ++j) flat = flat * p.grid_n + (half + idx[j]);
        values.push_back(b.values[flat]);
        std::size_t j = k;
        while (j > 0 && ++idx[j - 1] == cells_per_axis) {
            idx[j - 1] = 0;
            --j;
        }
        if (j == 0) break;
    }
    return sym::grid(std::vector<std::vector<double>>(k, edges), std::move(values), 0.0);
}

}  // namespace detail

/// Builds a symbol a with gamma_{n,a} close to sigma on the window.
inline SynthesisResult synthesize_symbol(const LatticeFunction& sigma, const Partition& n, double epsilon,
                                         const MultiIndex& window, SynthesisParams params = {}) {
    const std::size_t k = sigma.arity();
    if (k > 2) throw UnsupportedError("synthesis is implemented for k <= 2");
    if (n.k() != k || window.size() != k) throw ArityError("partition, window and target arities differ");
    if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be nonnegative");
    if (params.grid_n == 0) params.grid_n = k == 1 ? 4096 : 512;
    if (params.bins == 0) throw ParameterError("head correction needs at least one bin");
    if (!(params.lambda > 0.0)) throw ParameterError("ridge parameter must be positive");
    Window user_window(window);
    window_cells(window, default_cell_cap);

    // Reduce to n = 1: gamma_{n,a}(m) = gamma_{1,a}(m + n - 1).
    MultiIndex offset(k), reduced_bounds(k);
    bool identity = true;
    for (std::size_t j = 0; j < k; ++j) {
        offset[j] = n[j] - 1;
        reduced_bounds[j] = window[j] + offset[j];
        identity = identity && offset[j] == 0;
    }
    LatticeFunction target = identity ? sigma : shift_right(sigma, offset);
    Window reduced(reduced_bounds);
    const Partition ones = Partition::ones(k);
    if (params.head_n < 0) params.head_n = *std::max_element(reduced_bounds.begin(), reduced_bounds.end());

    SynthesisReport report;
    report.window = window;
    report.partition = n;
    report.epsilon = epsilon;

    std::vector<cplx> wanted(reduced.cells());
    for (std::size_t f = 0; f < wanted.size(); ++f) wanted[f] = target.eval_unchecked(reduced.index(f));
    // A constant symbol reproduces a constant for every n, so only the
    // indices the original window asks for matter here.
    const Window original(window);
    const cplx first = sigma.eval_unchecked(original.index(0));
    bool constant = true;
    for (std::size_t f = 1; f < original.cells() && constant; ++f) constant = sigma.eval_unchecked(original.index(f)) == first;

    std::optional<QuasiRadialSymbol> result;
    if (constant) {
        result.emplace(sym::constant(first), static_cast<int>(k));
        report.flags.push_back("constant target");
        report.flags.push_back("head correction skipped");
    } else {
        auto tail = detail::tail_symbol(target, params);
        QuasiRadialSymbol tail_sym(tail, static_cast<int>(k));

        // Residual of the tail on the head rows.
        std::vector<std::size_t> rows;
        for (std::size_t f = 0; f < reduced.cells(); ++f) {
            auto m = reduced.index(f);
            if (std::any_of(m.begin(), m.end(), [&](auto v) { return v <= params.head_n; })) rows.push_back(f);
        }
        const double nh = static_cast<double>(params.head_n);
        const double radius = nh + 12.0 * std::sqrt(nh) + 30.0;
        report.head_radius = radius;
        const std::size_t bins = params.bins;
        std::vector<double> edges(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i) edges[i] = std::sqrt(radius) * static_cast<double>(i) / static_cast<double>(bins);

        std::vector<cplx> residual(rows.size());
        detail::IntegralMemo tail_memo;
        parallel_for(rows.size(), [&](std::size_t r) {
            auto m = reduced.index(rows[r]);
            residual[r] = wanted[rows[r]] - eigenvalue_ex(tail_sym, ones, m, params.order, QuadMode::adaptive, &tail_memo).value;
        });

        // One-dimensional bin probabilities per axis and shape.
        std::vector<std::vector<std::vector<double>>> prob(k);
        for (std::size_t j = 0; j < k; ++j) {
            prob[j].assign(static_cast<std::size_t>(reduced_bounds[j] + 1), std::vector<double>(bins));
            std::vector<QuasiRadialSymbol> bin_syms;
            for (std::size_t b = 0; b < bins; ++b)
                bin_syms.emplace_back(sym::indicator({edges[b]}, {edges[b + 1]}), 1);
            parallel_for(prob[j].size(), [&](std::size_t mj) {
                double shape = static_cast<double>(mj) + 1.0;
                for (std::size_t b = 0; b < bins; ++b)
                    prob[j][mj][b] =
                        gamma_expectation_ex(bin_syms[b], std::span<const double>(&shape, 1), params.order, QuadMode::adaptive)
                            .value.real();
            });
        }
        std::size_t cols = 1;
        for (std::size_t j = 0; j < k; ++j) cols *= bins;
        Eigen::MatrixXd A(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto m = reduced.index(rows[r]);
            for (std::size_t c = 0; c < cols; ++c) {
                std::size_t rest = c;
                double v = 1.0;
                for (std::size_t j = k; j-- > 0;) {
                    v *= prob[j][static_cast<std::size_t>(m[j])][rest % bins];
                    rest /= bins;
                }
                A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            }
        }
        Eigen::MatrixXd rhs(rows.size(), 2);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            rhs(static_cast<Eigen::Index>(r), 0) = residual[r].real();
            rhs(static_cast<Eigen::Index>(r), 1) = residual[r].imag();
        }
        Eigen::MatrixXd coef;
        const auto nr = A.rows(), nc = A.cols();
        if (nr >= nc) {
            Eigen::MatrixXd normal = A.transpose() * A;
            normal.diagonal().array() += params.lambda;
            coef = normal.ldlt().solve(A.transpose() * rhs);
        } else {
            Eigen::MatrixXd gram = A * A.transpose();
            gram.diagonal().array() += params.lambda;
            coef = A.transpose() * gram.ldlt().solve(rhs);
        }
        std::vector<cplx> head_values(cols);
        for (std::size_t c = 0; c < cols; ++c)
            head_values[c] = cplx(coef(static_cast<Eigen::Index>(c), 0), coef(static_cast<Eigen::Index>(c), 1));
        auto head = sym::grid(std::vector<std::vector<double>>(k, edges), std::move(head_values), 0.0);
        result.emplace(sym::sum({{1.0, tail}, {1.0, head}}), static_cast<int>(k));
    }

    // Residuals through the spectrum path, in the caller's coordinates.
    const std::size_t cells = user_window.cells();
    std::vector<double> res(cells);
    detail::IntegralMemo memo;
    parallel_for(cells, [&](std::size_t f) {
        auto m = user_window.index(f);
        cplx gamma = eigenvalue_ex(*result, n, m, params.order, QuadMode::automatic, &memo).value;
        res[f] = std::abs(sigma.eval_unchecked(m) - gamma);
    });
    for (std::size_t f = 0; f < cells; ++f) {
        report.residuals.emplace_back(user_window.index(f), res[f]);
        report.sup_residual = std::max(report.sup_residual, res[f]);
    }
    report.params = params;
    if (report.sup_residual > epsilon) report.flags.push_back("target missed");
    return {*result, std::move(report)};
}

}  // namespace qrt
