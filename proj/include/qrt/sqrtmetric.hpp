#pragma once

// The square-root metric rho_k on N_0^k, windowed modulus of continuity and
// the left/right shift operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qrt/errors.hpp"
#include "qrt/parallel.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

inline double sqrt_gap(std::int64_t a, std::int64_t b) {
    if (a == b) return 0.0;
    double x = static_cast<double>(a), y = static_cast<double>(b);
    return std::abs(x - y) / (std::sqrt(x) + std::sqrt(y));
}

/// rho(m, m') = sum_i |sqrt(m_i) - sqrt(m'_i)|
inline double rho(std::span<const std::int64_t> m, std::span<const std::int64_t> mp) {
    if (m.size() != mp.size()) throw ArityError("rho needs multi-indices of equal length");
    double acc = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) acc += sqrt_gap(m[j], mp[j]);
    return acc;
}

inline double rho(std::initializer_list<std::int64_t> m, std::initializer_list<std::int64_t> mp) {
    return rho(std::span<const std::int64_t>(m.begin(), m.size()), std::span<const std::int64_t>(mp.begin(), mp.size()));
}

/// The box [0, M_1] x ... x [0, M_k].
struct Window {
    MultiIndex bounds;

    Window() = default;
    explicit Window(MultiIndex b) : bounds(std::move(b)) {
        if (bounds.empty()) throw ParameterError("empty window");
        for (auto v : bounds)
            if (v < 0) throw ParameterError("window bounds must be nonnegative");
    }

    std::size_t k() const noexcept { return bounds.size(); }
    std::size_t extent(std::size_t j) const { return static_cast<std::size_t>(bounds[j] + 1); }
    std::size_t cells() const {
        std::size_t c = 1;
        for (std::size_t j = 0; j < k(); ++j) c *= extent(j);
        return c;
    }
    std::size_t flat(std::span<const std::int64_t> m) const {
        std::size_t f = 0;
        for (std::size_t j = 0; j < k(); ++j) f = f * extent(j) + static_cast<std::size_t>(m[j]);
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
    bool contains(std::span<const std::int64_t> m) const {
        for (std::size_t j = 0; j < k(); ++j)
            if (m[j] < 0 || m[j] > bounds[j]) return false;
        return true;
    }
    /// Window enlarged by s in every coordinate.
    Window enlarged(std::span<const std::int64_t> s) const {
        MultiIndex b = bounds;
        for (std::size_t j = 0; j < k(); ++j) b[j] += s[j];
        return Window(std::move(b));
    }
};

inline constexpr std::size_t modulus_cell_cap = 20'000'000;

/// Windowed moduli for every delta at once: out[i] is the sup of
/// |sigma(m) - sigma(m')| over window pairs with rho <= deltas[i]. Pairs
/// are enumerated inside the per-coordinate sqrt-balls of radius max(delta).
inline std::vector<double> modulus_batch(const LatticeFunction& sigma, std::span<const double> deltas,
                                         const Window& w) {
    if (w.k() == 0) throw ParameterError("empty window");
    if (w.k() != sigma.arity()) throw ArityError("window arity does not match the lattice function");
    for (double d : deltas)
        if (!(d > 0.0)) throw ParameterError("modulus needs delta > 0");
    if (deltas.empty()) return {};
    const std::size_t cells = w.cells();
    if (cells > modulus_cell_cap) throw ResourceError("modulus window exceeds the cell cap");

    std::vector<cplx> values(cells);
    parallel_for(chunking(cells).count(), [&](std::size_t c) {
        auto layout = chunking(cells);
        for (std::size_t f = layout.begin(c); f < layout.end(c); ++f) {
            auto m = w.index(f);
            values[f] = sigma.eval_unchecked(m);
        }
    });
    std::vector<std::size_t> order(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
    std::vector<double> sorted(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = deltas[order[i]];
    const double dmax = sorted.back();
    const std::size_t k = w.k();

    auto layout = chunking(cells, 256);
    std::vector<std::vector<double>> partial(layout.count(), std::vector<double>(sorted.size(), 0.0));
    parallel_for(layout.count(), [&](std::size_t c) {
        auto& best = partial[c];
        MultiIndex mp(k);
        std::vector<std::int64_t> lo(k), hi(k);
        for (std::size_t f = layout.begin(c); f < layout.end(c); ++f) {
            auto m = w.index(f);
            for (std::size_t j = 0; j < k; ++j) {
                double r = std::sqrt(static_cast<double>(m[j]));
                double a = std::max(0.0, r - dmax);
                lo[j] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(a * a)) - 1);
                hi[j] = std::min<std::int64_t>(w.bounds[j], static_cast<std::int64_t>(std::ceil((r + dmax) * (r + dmax))) + 1);
            }
            const cplx v = values[f];
            // Odometer over the box of candidates, pruned by partial rho.
            std::vector<double> partial_rho(k + 1, 0.0);
            std::size_t j = 0;
            mp[0] = lo[0] - 1;
            while (true) {
                if (++mp[j] > hi[j]) {
                    if (j == 0) break;
                    --j;
                    continue;
                }
                double pr = partial_rho[j] + sqrt_gap(m[j], mp[j]);
                if (pr > dmax) {
                    if (mp[j] > m[j]) {
                        mp[j] = hi[j];
                    }
                    continue;
                }
                partial_rho[j + 1] = pr;
                if (j + 1 < k) {
                    ++j;
                    mp[j] = lo[j] - 1;
                    continue;
                }
                double diff = std::abs(v - values[w.flat(mp)]);
                if (diff == 0.0) continue;
                auto it = std::lower_bound(sorted.begin(), sorted.end(), pr);
                if (it == sorted.end()) continue;
                auto idx = static_cast<std::size_t>(it - sorted.begin());
                best[idx] = std::max(best[idx], diff);
            }
        }
    });
    std::vector<double> merged(sorted.size(), 0.0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = std::max(merged[i], p[i]);
    for (std::size_t i = 1; i < merged.size(); ++i) merged[i] = std::max(merged[i], merged[i - 1]);
    std::vector<double> out(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = merged[i];
    return out;
}

/// Windowed modulus of continuity; a lower bound for the modulus on N_0^k.
inline double modulus(const LatticeFunction& sigma, double delta, const Window& w) {
    double d[] = {delta};
    return modulus_batch(sigma, d, w)[0];
}

/// Windowed modulus as a step function of delta, from every window pair.
class ModulusProfile {
public:
    ModulusProfile(const LatticeFunction& sigma, const Window& w, std::size_t max_cells = 4096) {
        if (w.k() != sigma.arity()) throw ArityError("window arity does not match the lattice function");
        const std::size_t cells = w.cells();
        if (cells > max_cells) throw ResourceError("modulus profile window is too large");
        std::vector<cplx> v(cells);
        std::vector<MultiIndex> idx(cells);
        for (std::size_t f = 0; f < cells; ++f) {
            idx[f] = w.index(f);
            v[f] = sigma.eval_unchecked(idx[f]);
        }
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(cells * (cells - 1) / 2);
        for (std::size_t a = 0; a < cells; ++a)
            for (std::size_t b = a + 1; b < cells; ++b) pairs.emplace_back(rho(idx[a], idx[b]), std::abs(v[a] - v[b]));
        std::sort(pairs.begin(), pairs.end());
        double run = 0.0;
        for (const auto& [r, d] : pairs) {
            run = std::max(run, d);
            if (!steps_.empty() && steps_.back().first == r)
                steps_.back().second = run;
            else
                steps_.emplace_back(r, run);
        }
    }

    double operator()(double delta) const {
        auto it = std::upper_bound(steps_.begin(), steps_.end(), std::make_pair(delta, std::numeric_limits<double>::infinity()));
        return it == steps_.begin() ? 0.0 : std::prev(it)->second;
    }

private:
    std::vector<std::pair<double, double>> steps_;
};

/// (tau_L^s sigma)(m) = sigma(m + s)
inline LatticeFunction shift_left(const LatticeFunction& sigma, MultiIndex s) {
    if (s.size() != sigma.arity()) throw ArityError("shift length does not match the lattice function");
    for (auto v : s)
        if (v < 0) throw ParameterError("shift entries must be nonnegative");
    return LatticeFunction(lat::make(lat::Shift{true, std::move(s), sigma.root_ptr()}));
}

/// (tau_R^s sigma)(m) = sigma(m - s) when m >= s, else 0
inline LatticeFunction shift_right(const LatticeFunction& sigma, MultiIndex s) {
    if (s.size() != sigma.arity()) throw ArityError("shift length does not match the lattice function");
    for (auto v : s)
        if (v < 0) throw ParameterError("shift entries must be nonnegative");
    return LatticeFunction(lat::make(lat::Shift{false, std::move(s), sigma.root_ptr()}));
}

}  // namespace qrt
