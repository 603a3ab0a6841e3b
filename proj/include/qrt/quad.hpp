#pragma once

// Generalized Gauss-Laguerre rules, Gamma expectations E[a(sqrt R)] and
// Monte Carlo samplers against the Gaussian measure.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qrt/errors.hpp"
#include "qrt/parallel.hpp"
#include "qrt/rng.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

struct QuadRule {
    double alpha = 0.0;
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// L_n^{(alpha)}(x) and L_{n-1}^{(alpha)}(x), rescaled by a common factor.
inline std::pair<double, double> laguerre_pair(int n, double alpha, double x, double& log_scale) {
    double prev = 1.0, cur = 1.0 + alpha - x;
    log_scale = 0.0;
    if (n == 0) return {1.0, 0.0};
    for (int j = 1; j < n; ++j) {
        double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
        double mag = std::abs(cur);
        if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
            log_scale += std::log(mag);
            prev /= mag;
            cur /= mag;
        }
    }
    return {cur, prev};
}

inline QuadRule laguerre_rule_unchecked(double alpha, int order) {
    const int q = order;
    Eigen::VectorXd diag(q), sub(std::max(q - 1, 0));
    for (int i = 0; i < q; ++i) diag(i) = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < q; ++i) sub(i - 1) = std::sqrt(i * (i + alpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("Jacobi eigensolve failed");

    QuadRule rule;
    rule.alpha = alpha;
    rule.order = q;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    const double log_norm = std::lgamma(q + alpha + 1.0) - std::lgamma(q + 1.0) - std::lgamma(alpha + 1.0) -
                            2.0 * std::log(q + 1.0);
    for (int i = 0; i < q; ++i) {
        double x = solver.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            double ls;
            auto [ln, lm1] = laguerre_pair(q, alpha, x, ls);
            double deriv = (q * ln - (q + alpha) * lm1) / x;
            if (deriv == 0.0) break;
            double step = ln / deriv;
            if (!std::isfinite(step) || std::abs(step) > 1e-6 * x + 1e-12) break;
            x -= step;
        }
        double ls;
        auto [lq1, lq] = laguerre_pair(q + 1, alpha, x, ls);
        (void)lq;
        rule.nodes[i] = x;
        rule.weights[i] = std::exp(log_norm + std::log(x) - 2.0 * (std::log(std::abs(lq1)) + ls));
    }
    double total = 0.0;
    for (double w : rule.weights) total += w;
    for (double& w : rule.weights) w /= total;
    return rule;
}

}  // namespace detail

/// Gauss rule for the probability density r^alpha e^{-r} / Gamma(alpha+1).
inline QuadRule laguerre_rule(double alpha, int order) {
    if (!(alpha >= 0.0)) throw ParameterError("laguerre_rule needs alpha >= 0");
    if (order < 1) throw ParameterError("laguerre_rule needs order >= 1");
    return detail::laguerre_rule_unchecked(alpha, order);
}

/// Thread-safe memo of rules keyed by (alpha, order).
class RuleCache {
public:
    std::shared_ptr<const QuadRule> get(double alpha, int order) {
        auto key = std::make_pair(alpha, order);
        {
            std::shared_lock lock(mutex_);
            if (auto it = rules_.find(key); it != rules_.end()) return it->second;
        }
        auto rule = std::make_shared<const QuadRule>(detail::laguerre_rule_unchecked(alpha, order));
        std::unique_lock lock(mutex_);
        return rules_.emplace(key, rule).first->second;
    }

    static RuleCache& global() {
        static RuleCache cache;
        return cache;
    }

private:
    std::shared_mutex mutex_;
    std::map<std::pair<double, int>, std::shared_ptr<const QuadRule>> rules_;
};

enum class QuadMode { automatic, smooth, adaptive };

inline QuadMode parse_mode(std::string_view s) {
    if (s == "smooth") return QuadMode::smooth;
    if (s == "adaptive") return QuadMode::adaptive;
    if (s == "auto") return QuadMode::automatic;
    throw ParameterError("mode must be smooth, adaptive or auto");
}

struct GammaResult {
    cplx value;
    double error;
};

inline constexpr int default_order = 80;

namespace detail {

/// One summand w * grid(s) * prod_j prod f(s_j) * 1[lo_j <= s_j < hi_j].
struct SepTerm {
    cplx weight = 1.0;
    std::vector<std::vector<const sym::Node*>> factors;
    std::vector<double> lo, hi;
    const sym::Grid* grid = nullptr;
};

inline SepTerm unit_term(std::size_t k) {
    SepTerm t;
    t.factors.resize(k);
    t.lo.assign(k, 0.0);
    t.hi.assign(k, std::numeric_limits<double>::infinity());
    return t;
}

inline std::optional<SepTerm> merge_terms(const SepTerm& a, const SepTerm& b) {
    if (a.grid && b.grid) return std::nullopt;
    SepTerm t = a;
    t.weight *= b.weight;
    t.grid = a.grid ? a.grid : b.grid;
    for (std::size_t j = 0; j < t.factors.size(); ++j) {
        t.factors[j].insert(t.factors[j].end(), b.factors[j].begin(), b.factors[j].end());
        t.lo[j] = std::max(t.lo[j], b.lo[j]);
        t.hi[j] = std::min(t.hi[j], b.hi[j]);
    }
    return t;
}

inline bool empty_term(const SepTerm& t) {
    if (t.weight == 0.0) return true;
    for (std::size_t j = 0; j < t.lo.size(); ++j)
        if (!(t.lo[j] < t.hi[j])) return true;
    return false;
}

/// Sum-of-products expansion; nullopt when the expression is not separable
/// (two grids multiplied) or expands past `cap` terms.
inline std::optional<std::vector<SepTerm>> separate(const sym::Node& node, std::size_t k, std::size_t cap) {
    using Out = std::optional<std::vector<SepTerm>>;
    return std::visit(
        [&](const auto& n) -> Out {
            using T = std::decay_t<decltype(n)>;
            std::vector<SepTerm> out;
            SepTerm t = unit_term(k);
            if constexpr (std::is_same_v<T, sym::Const>) {
                t.weight = n.value;
            } else if constexpr (std::is_same_v<T, sym::Indicator>) {
                for (std::size_t i = 0; i < n.coords.size(); ++i) {
                    auto c = static_cast<std::size_t>(n.coords[i]);
                    t.lo[c] = std::max(t.lo[c], n.lower[i]);
                    t.hi[c] = std::min(t.hi[c], n.upper[i]);
                }
            } else if constexpr (std::is_same_v<T, sym::Grid>) {
                t.grid = &n;
            } else if constexpr (std::is_same_v<T, sym::Sum>) {
                for (const auto& [w, child] : n.terms) {
                    auto sub = separate(*child, k, cap);
                    if (!sub) return std::nullopt;
                    for (auto& s : *sub) {
                        s.weight *= w;
                        if (!empty_term(s)) out.push_back(std::move(s));
                    }
                    if (out.size() > cap) return std::nullopt;
                }
                return out;
            } else if constexpr (std::is_same_v<T, sym::Product>) {
                out.push_back(t);
                for (const auto& f : n.factors) {
                    auto sub = separate(*f, k, cap);
                    if (!sub) return std::nullopt;
                    std::vector<SepTerm> next;
                    for (const auto& a : out)
                        for (const auto& b : *sub) {
                            auto m = merge_terms(a, b);
                            if (!m) return std::nullopt;
                            if (!empty_term(*m)) next.push_back(std::move(*m));
                            if (next.size() > cap) return std::nullopt;
                        }
                    out = std::move(next);
                }
                return out;
            } else {
                t.factors[static_cast<std::size_t>(n.coord)].push_back(&node);
            }
            if (!empty_term(t)) out.push_back(std::move(t));
            return out;
        },
        node.body);
}

/// Value of a one-coordinate leaf at s.
inline double leaf_value(const sym::Node* leaf, double s) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, sym::Power>) {
                return std::min(std::pow(s, n.exponent), n.cap);
            } else if constexpr (std::is_same_v<T, sym::Sin>) {
                return std::sin(n.freq * s);
            } else if constexpr (std::is_same_v<T, sym::Cos>) {
                return std::cos(n.freq * s);
            } else if constexpr (std::is_same_v<T, sym::Gauss>) {
                double u = n.scale * s;
                return std::exp(-u * u);
            } else {
                return 1.0;
            }
        },
        leaf->body);
}

inline double leaves_value(const std::vector<const sym::Node*>& leaves, double s) {
    double v = 1.0;
    for (const auto* l : leaves) v *= leaf_value(l, s);
    return v;
}

inline double leaves_sup(const std::vector<const sym::Node*>& leaves) {
    double v = 1.0;
    for (const auto* l : leaves) v *= sym::sup_bound(*l);
    return v;
}

/// Truncation box in s = sqrt(r) for Gamma(shape): mass outside is bounded
/// by the returned tail.
struct SBand {
    double lo, hi, tail;
};

inline SBand s_band(double shape) {
    double spread = 12.0 * std::sqrt(shape) + 30.0;
    double upper = shape + spread;
    double lower = shape - spread;
    SBand b{0.0, std::sqrt(upper), boost::math::gamma_q(shape, upper)};
    if (lower > 0.0) {
        b.lo = std::sqrt(lower);
        b.tail += boost::math::gamma_p(shape, lower);
    }
    return b;
}

/// Density of s = sqrt(R), R ~ Gamma(shape).
/// Evaluated relative to the mode s0 so the exponent carries no cancellation noise.
struct SDensity {
    double shape, s0, log_peak;
    explicit SDensity(double a) : shape(a), s0(std::sqrt(std::max(a - 0.5, 0.5))) {
        log_peak = std::log(2.0) - std::lgamma(a) + (2.0 * a - 1.0) * std::log(s0) - s0 * s0;
    }
    double operator()(double s) const {
        if (s <= 0.0) return 0.0;
        double d = s - s0;
        return std::exp(log_peak + (2.0 * shape - 1.0) * std::log1p(d / s0) - d * (s + s0));
    }
};

/// Memo for one-dimensional factor integrals, keyed by the leaves, shape and interval.
class IntegralMemo {
public:
    using Key = std::tuple<std::vector<const void*>, double, double, double>;

    std::optional<std::pair<double, double>> find(const Key& key) const {
        std::shared_lock lock(mutex_);
        if (auto it = map_.find(key); it != map_.end()) return it->second;
        return std::nullopt;
    }
    void put(const Key& key, std::pair<double, double> v) {
        std::unique_lock lock(mutex_);
        map_.emplace(key, v);
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<Key, std::pair<double, double>> map_;
};

/// int_lo^hi prod leaves(s) p_shape(s) ds restricted to the band; returns (value, quadrature error).
inline std::pair<double, double> integrate_leaves(const std::vector<const sym::Node*>& leaves, double shape, double lo,
                                                  double hi, const SBand& band, IntegralMemo* memo) {
    double a = std::max(lo, band.lo), b = std::min(hi, band.hi);
    if (!(a < b)) return {0.0, 0.0};
    IntegralMemo::Key key;
    if (memo) {
        std::vector<const void*> ids(leaves.begin(), leaves.end());
        std::sort(ids.begin(), ids.end());
        key = {std::move(ids), shape, a, b};
        if (auto hit = memo->find(key)) return *hit;
    }
    std::vector<double> cuts{a, b};
    for (const auto* l : leaves) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, sym::Power>) {
                    if (n.exponent > 0.0) cuts.push_back(std::pow(n.cap, 1.0 / n.exponent));
                }
            },
            l->body);
    }
    std::sort(cuts.begin(), cuts.end());
    SDensity dens(shape);
    // The density is unimodal, so its peak on [a, b] bounds the whole piece.
    const double bound = dens(std::clamp(dens.s0, a, b)) * (b - a) * leaves_sup(leaves);
    if (bound < 1e-18) {
        std::pair<double, double> out{0.0, bound};
        if (memo) memo->put(key, out);
        return out;
    }
    auto f = [&](double s) { return leaves_value(leaves, s) * dens(s); };
    double value = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double x0 = std::max(cuts[i], a), x1 = std::min(cuts[i + 1], b);
        if (!(x0 < x1)) continue;
        double e = 0.0;
        value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x0, x1, 12, 1e-12, &e);
        err += e;
    }
    std::pair<double, double> out{value, err};
    if (memo) memo->put(key, out);
    return out;
}

inline cplx separable_adaptive(const std::vector<SepTerm>& terms, std::span<const double> shape,
                               std::span<const SBand> bands, double& err, IntegralMemo* memo) {
    const std::size_t k = shape.size();
    cplx total = 0.0;
    for (const auto& t : terms) {
        double term_err = 0.0;
        std::vector<double> full(k), sups(k);
        for (std::size_t j = 0; j < k; ++j) {
            auto [v, e] = integrate_leaves(t.factors[j], shape[j], t.lo[j], t.hi[j], bands[j], memo);
            full[j] = v;
            sups[j] = leaves_sup(t.factors[j]);
            term_err += e;
        }
        if (!t.grid) {
            double p = 1.0;
            for (double v : full) p *= v;
            total += t.weight * p;
            double s = 1.0;
            for (double v : sups) s *= v;
            err += std::abs(t.weight) * s * term_err;
            continue;
        }
        const auto& g = *t.grid;
        const std::size_t d = g.dims();
        std::vector<std::vector<double>> cell(d);
        std::vector<double> inside_sum(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            const auto& e = g.edges[j];
            cell[j].assign(e.size() - 1, 0.0);
            for (std::size_t i = 0; i + 1 < e.size(); ++i) {
                double lo = std::max(e[i], t.lo[j]), hi = std::min(e[i + 1], t.hi[j]);
                if (!(lo < hi) || hi <= bands[j].lo || lo >= bands[j].hi) continue;
                auto [v, er] = integrate_leaves(t.factors[j], shape[j], lo, hi, bands[j], memo);
                cell[j][i] = v;
                inside_sum[j] += v;
                term_err += er;
            }
        }
        std::vector<std::vector<std::size_t>> live(d);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < cell[j].size(); ++i)
                if (cell[j][i] != 0.0) live[j].push_back(i);
        cplx inside = 0.0;
        bool any = std::all_of(live.begin(), live.end(), [](const auto& l) { return !l.empty(); });
        if (any) {
            std::vector<std::size_t> stride(d, 1);
            for (std::size_t j = d - 1; j-- > 0;) stride[j] = stride[j + 1] * cell[j + 1].size();
            std::vector<std::size_t> pos(d, 0);
            while (true) {
                std::size_t flat = 0;
                double w = 1.0;
                for (std::size_t j = 0; j < d; ++j) {
                    std::size_t i = live[j][pos[j]];
                    flat += i * stride[j];
                    w *= cell[j][i];
                }
                inside += g.values[flat] * w;
                std::size_t j = d;
                while (j > 0) {
                    --j;
                    if (++pos[j] < live[j].size()) break;
                    pos[j] = 0;
                    if (j == 0) {
                        j = d + 1;
                        break;
                    }
                }
                if (j == d + 1) break;
            }
        }
        double pf = 1.0, pi = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            pf *= full[j];
            pi *= inside_sum[j];
        }
        cplx value = inside + g.outside * (pf - pi);
        double rest = 1.0, s = 1.0;
        for (std::size_t j = 0; j < k; ++j) s *= sups[j];
        for (std::size_t j = d; j < k; ++j) rest *= full[j];
        total += t.weight * value * rest;
        double gsup = std::abs(g.outside);
        for (cplx v : g.values) gsup = std::max(gsup, std::abs(v));
        err += std::abs(t.weight) * s * gsup * term_err;
    }
    return total;
}

inline cplx separable_smooth(const std::vector<SepTerm>& terms, std::span<const double> shape, int order) {
    const std::size_t k = shape.size();
    std::vector<std::shared_ptr<const QuadRule>> rules(k);
    for (std::size_t j = 0; j < k; ++j) rules[j] = RuleCache::global().get(shape[j] - 1.0, order);
    cplx total = 0.0;
    for (const auto& t : terms) {
        double p = 1.0;
        for (std::size_t j = 0; j < k && p != 0.0; ++j) {
            if (t.factors[j].empty()) continue;
            const auto& r = *rules[j];
            double acc = 0.0;
            for (int q = 0; q < r.order; ++q) acc += r.weights[q] * leaves_value(t.factors[j], std::sqrt(r.nodes[q]));
            p *= acc;
        }
        total += t.weight * p;
    }
    return total;
}

inline cplx tensor_smooth(const QuasiRadialSymbol& a, std::span<const double> shape, int order) {
    const std::size_t k = shape.size();
    std::vector<std::shared_ptr<const QuadRule>> rules(k);
    for (std::size_t j = 0; j < k; ++j) rules[j] = RuleCache::global().get(shape[j] - 1.0, order);
    std::vector<int> idx(k, 0);
    std::vector<double> s(k);
    cplx total = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            w *= rules[j]->weights[idx[j]];
            s[j] = std::sqrt(rules[j]->nodes[idx[j]]);
        }
        total += w * a.eval_unchecked(s);
        std::size_t j = k;
        while (j > 0 && ++idx[j - 1] == order) idx[--j] = 0;
        if (j == 0) break;
    }
    return total;
}

/// Nested adaptive integration for symbols that do not separate.
inline cplx tensor_adaptive(const QuasiRadialSymbol& a, std::span<const double> shape, std::span<const SBand> bands,
                            double& err) {
    const std::size_t k = shape.size();
    std::vector<std::vector<double>> cuts(k);
    std::vector<SDensity> dens;
    for (std::size_t j = 0; j < k; ++j) {
        dens.emplace_back(shape[j]);
        std::vector<double> bp;
        sym::breakpoints(a.root(), static_cast<int>(j), bp);
        cuts[j] = {bands[j].lo, bands[j].hi};
        for (double b : bp)
            if (b > bands[j].lo && b < bands[j].hi) cuts[j].push_back(b);
        std::sort(cuts[j].begin(), cuts[j].end());
        cuts[j].erase(std::unique(cuts[j].begin(), cuts[j].end()), cuts[j].end());
    }
    std::vector<double> s(k);
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    std::function<cplx(std::size_t)> level = [&](std::size_t j) -> cplx {
        if (j == k) return a.eval_unchecked(s);
        cplx acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts[j].size(); ++i) {
            double e = 0.0;
            auto part = [&](bool imag) {
                auto f = [&](double x) {
                    s[j] = x;
                    cplx v = level(j + 1);
                    return (imag ? v.imag() : v.real()) * dens[j](x);
                };
                return GK::integrate(f, cuts[j][i], cuts[j][i + 1], j + 1 == k ? 8 : 3, 1e-11, &e);
            };
            double re = part(false);
            double er = e;
            double im = a.is_real() ? 0.0 : part(true);
            if (j == 0) err += er + e;
            acc += cplx(re, im);
        }
        return acc;
    };
    return level(0);
}

inline void clamp_to_symbol(const QuasiRadialSymbol& a, cplx& v) {
    if (a.is_real()) v.imag(0.0);
    if (a.is_nonnegative()) v = cplx(std::max(v.real(), 0.0), 0.0);
    double sup = a.declared_sup(), mag = std::abs(v);
    if (mag > sup) v *= (mag > 0.0 ? sup / mag : 0.0);
}

inline constexpr std::size_t separation_cap = 4096;

}  // namespace detail

/// E[a(sqrt R_1, ..., sqrt R_k)] with R_j ~ Gamma(shape_j, 1) independent.
/// `memo` may be shared across calls on the same symbol.
inline GammaResult gamma_expectation_ex(const QuasiRadialSymbol& a, std::span<const double> shape,
                                        int order = default_order, QuadMode mode = QuadMode::automatic,
                                        detail::IntegralMemo* memo = nullptr) {
    const std::size_t k = shape.size();
    if (k == 0) throw ArityError("empty shape vector");
    if (!a.conforms(k)) throw ArityError("symbol arity does not match the shape vector");
    for (double sh : shape)
        if (!(sh > 0.0) || !std::isfinite(sh)) throw ParameterError("Gamma shapes must be positive");
    if (order < 2) throw ParameterError("quadrature order must be at least 2");
    const bool cont = a.is_continuous();
    const bool automatic = mode == QuadMode::automatic;
    if (automatic) {
        mode = cont ? QuadMode::smooth : QuadMode::adaptive;
        // Kinks of capped powers inside the band spoil Gauss-Laguerre convergence.
        for (std::size_t j = 0; j < k && mode == QuadMode::smooth; ++j) {
            std::vector<double> bp;
            sym::breakpoints(a.root(), static_cast<int>(j), bp);
            auto band = detail::s_band(shape[j]);
            for (double b : bp)
                if (b >= band.lo && b < band.hi) mode = QuadMode::adaptive;
        }
    }
    if (mode == QuadMode::smooth && !cont) throw ModeError("smooth mode needs a continuous symbol; use adaptive");

    auto terms = detail::separate(a.root(), k, detail::separation_cap);
    GammaResult out{0.0, 0.0};
    if (mode == QuadMode::smooth) {
        int half = (order + 1) / 2;
        cplx full, coarse;
        if (terms) {
            full = detail::separable_smooth(*terms, shape, order);
            coarse = detail::separable_smooth(*terms, shape, half);
        } else {
            full = detail::tensor_smooth(a, shape, order);
            coarse = detail::tensor_smooth(a, shape, half);
        }
        out.value = full;
        out.error = std::abs(full - coarse);
        // Non-smooth behaviour in r near 0 (odd functions of s at small
        // shapes) shows up as disagreement between the two orders.
        if (automatic && out.error > 1e-12 * std::max(a.declared_sup(), 1.0)) mode = QuadMode::adaptive;
    }
    if (mode == QuadMode::adaptive) {
        std::vector<detail::SBand> bands;
        double tail = 0.0;
        for (double sh : shape) {
            bands.push_back(detail::s_band(sh));
            tail += bands.back().tail;
        }
        double qerr = 0.0;
        out.value = terms ? detail::separable_adaptive(*terms, shape, bands, qerr, memo)
                          : detail::tensor_adaptive(a, shape, bands, qerr);
        out.error = qerr + a.declared_sup() * tail;
    }
    out.error += 64.0 * std::numeric_limits<double>::epsilon() * std::max(a.declared_sup(), 1.0);
    detail::clamp_to_symbol(a, out.value);
    return out;
}

inline cplx gamma_expectation(const QuasiRadialSymbol& a, std::span<const double> shape, int order = default_order,
                              QuadMode mode = QuadMode::automatic) {
    return gamma_expectation_ex(a, shape, order, mode).value;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct McEstimate {
    cplx mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

/// Per-chunk power sums, merged across chunks in a fixed order.
struct Moments {
    double n = 0.0;
    double mean_re = 0.0, m2_re = 0.0, mean_im = 0.0, m2_im = 0.0;

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        double total = n + o.n;
        double d = o.mean_re - mean_re;
        mean_re += d * o.n / total;
        m2_re += o.m2_re + d * d * n * o.n / total;
        d = o.mean_im - mean_im;
        mean_im += d * o.n / total;
        m2_im += o.m2_im + d * d * n * o.n / total;
        n = total;
    }
    McEstimate estimate(std::uint64_t seed) const {
        McEstimate e;
        e.mean = {mean_re, mean_im};
        e.samples = static_cast<std::uint64_t>(n);
        e.seed = seed;
        if (n > 1.0) {
            double var = (m2_re + m2_im) / (n - 1.0);
            e.std_error = std::sqrt(std::max(var, 0.0) / n);
        }
        return e;
    }
};

struct PowerSums {
    double n = 0.0, s_re = 0.0, s2_re = 0.0, s_im = 0.0, s2_im = 0.0;

    void add(cplx v) {
        n += 1.0;
        s_re += v.real();
        s2_re += v.real() * v.real();
        s_im += v.imag();
        s2_im += v.imag() * v.imag();
    }
    Moments moments() const {
        Moments m;
        if (n == 0.0) return m;
        m.n = n;
        m.mean_re = s_re / n;
        m.mean_im = s_im / n;
        m.m2_re = std::max(0.0, s2_re - s_re * s_re / n);
        m.m2_im = std::max(0.0, s2_im - s_im * s_im / n);
        return m;
    }
};

inline constexpr std::size_t mc_chunk = 8192;

}  // namespace detail

/// Runs `outputs` estimators over one shared Gaussian sample stream.
/// body(z, out) fills out[0..outputs) for the sample z in C^n.
template <class F>
std::vector<McEstimate> gaussian_mc_multi(std::size_t n, std::size_t outputs, std::uint64_t samples,
                                          std::uint64_t seed, F&& body) {
    if (samples < 1000) throw ParameterError("Monte Carlo needs at least 1000 samples");
    if (n == 0) throw ParameterError("dimension must be positive");
    auto layout = chunking(samples, detail::mc_chunk);
    std::vector<std::vector<detail::Moments>> parts(layout.count());
    parallel_for(layout.count(), [&](std::size_t c) {
        std::vector<cplx> z(n), out(outputs);
        std::vector<detail::PowerSums> acc(outputs);
        for (std::size_t i = layout.begin(c); i < layout.end(c); ++i) {
            CounterRng rng(seed, i);
            for (auto& zi : z) zi = rng.complex_normal();
            std::fill(out.begin(), out.end(), cplx(0.0));
            body(std::span<const cplx>(z), std::span<cplx>(out));
            for (std::size_t o = 0; o < outputs; ++o) acc[o].add(out[o]);
        }
        parts[c].resize(outputs);
        for (std::size_t o = 0; o < outputs; ++o) parts[c][o] = acc[o].moments();
    });
    std::vector<McEstimate> result(outputs);
    for (std::size_t o = 0; o < outputs; ++o) {
        detail::Moments total;
        for (const auto& p : parts) total.merge(p[o]);
        result[o] = total.estimate(seed);
    }
    return result;
}

/// Monte Carlo estimate of int f d lambda_n.
template <class F>
McEstimate gaussian_mc(F&& f, std::size_t n, std::uint64_t samples, std::uint64_t seed) {
    return gaussian_mc_multi(n, 1, samples, seed,
                             [&](std::span<const cplx> z, std::span<cplx> out) { out[0] = f(z); })[0];
}

/// Sampling estimate of E[a(sqrt R)] with R_j ~ Gamma(shape_j) drawn by the
/// standard library, independent of the Laguerre path.
inline McEstimate gamma_mc(const QuasiRadialSymbol& a, std::span<const double> shape, std::uint64_t samples,
                           std::uint64_t seed) {
    if (samples < 1000) throw ParameterError("Monte Carlo needs at least 1000 samples");
    if (!a.conforms(shape.size())) throw ArityError("symbol arity does not match the shape vector");
    auto layout = chunking(samples, detail::mc_chunk);
    std::vector<detail::Moments> parts(layout.count());
    parallel_for(layout.count(), [&](std::size_t c) {
        detail::PowerSums acc;
        std::mt19937_64 gen(splitmix64(seed ^ splitmix64(c + 1)));
        std::vector<std::gamma_distribution<double>> dists;
        for (double sh : shape) dists.emplace_back(sh, 1.0);
        std::vector<double> s(shape.size());
        for (std::size_t i = layout.begin(c); i < layout.end(c); ++i) {
            for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::sqrt(dists[j](gen));
            acc.add(a.eval_unchecked(s));
        }
        parts[c] = acc.moments();
    });
    detail::Moments total;
    for (const auto& p : parts) total.merge(p);
    return total.estimate(seed);
}

}  // namespace qrt
