#pragma once

// Extension of a lattice function sigma on N_0^k to a function f on R_+^k
// that is multilinear in (sqrt x_1, ..., sqrt x_k) on every unit cell.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qrt/errors.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

inline constexpr std::size_t max_extension_arity = 10;

namespace detail {

inline void check_subset(std::span<const int> subset, std::size_t k) {
    if (subset.empty()) throw ParameterError("coefficient subset must be nonempty");
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 1 || static_cast<std::size_t>(subset[i]) > k)
            throw ParameterError("coefficient subset entries must lie in 1..k");
        if (i > 0 && subset[i] <= subset[i - 1]) throw ParameterError("coefficient subset must be strictly increasing");
    }
}

inline unsigned subset_mask(std::span<const int> subset) {
    unsigned mask = 0;
    for (int s : subset) mask |= 1u << (s - 1);
    return mask;
}

inline MultiIndex corner(std::span<const std::int64_t> m, unsigned mask) {
    MultiIndex c(m.begin(), m.end());
    for (std::size_t j = 0; j < c.size(); ++j)
        if (mask & (1u << j)) ++c[j];
    return c;
}

/// (sqrt x - sqrt m) / (sqrt(m+1) - sqrt m) without cancellation.
inline double sqrt_fraction(double x, std::int64_t m) {
    double md = static_cast<double>(m);
    double d = x - md;
    if (d == 0.0) return 0.0;
    double sm = std::sqrt(md);
    return d * (std::sqrt(md + 1.0) + sm) / (std::sqrt(x) + sm);
}

}  // namespace detail

/// a^l_S(m) = sum over T subset of S of (-1)^{|S|-|T|} sigma(m + e_T), S 1-based.
inline cplx coeff(const LatticeFunction& sigma, std::span<const std::int64_t> m, std::span<const int> subset) {
    detail::check_subset(subset, sigma.arity());
    if (m.size() != sigma.arity()) throw ArityError("multi-index length does not match the lattice function");
    const unsigned s = detail::subset_mask(subset);
    const int size = std::popcount(s);
    cplx acc = 0.0;
    for (unsigned t = s;; t = (t - 1) & s) {
        double sign = ((size - std::popcount(t)) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * sigma(detail::corner(m, t));
        if (t == 0) break;
    }
    return acc;
}

/// Same coefficient through a^{l+1}_{S+s}(m) = a^l_S(m + e_s) - a^l_S(m).
inline cplx coeff_recursive(const LatticeFunction& sigma, std::span<const std::int64_t> m, std::span<const int> subset) {
    if (subset.empty()) return sigma(m);
    detail::check_subset(subset, sigma.arity());
    const int s = subset.back();
    auto rest = subset.first(subset.size() - 1);
    MultiIndex up(m.begin(), m.end());
    ++up[static_cast<std::size_t>(s - 1)];
    return coeff_recursive(sigma, up, rest) - coeff_recursive(sigma, m, rest);
}

/// Corner values and all 2^k coefficients on the cell [m, m + 1].
class CellEvaluation {
public:
    CellEvaluation(const LatticeFunction& sigma, MultiIndex m) : base_(std::move(m)) {
        const std::size_t k = base_.size();
        if (k != sigma.arity()) throw ArityError("cell arity does not match the lattice function");
        if (k > max_extension_arity) throw UnsupportedError("extension is capped at k = 10");
        const unsigned full = 1u << k;
        corners_.resize(full);
        coeffs_.resize(full);
        for (unsigned t = 0; t < full; ++t) corners_[t] = sigma.eval_unchecked(detail::corner(base_, t));
        for (unsigned s = 0; s < full; ++s) {
            const int size = std::popcount(s);
            cplx acc = 0.0;
            for (unsigned t = s;; t = (t - 1) & s) {
                double sign = ((size - std::popcount(t)) % 2 == 0) ? 1.0 : -1.0;
                acc += sign * corners_[t];
                if (t == 0) break;
            }
            coeffs_[s] = acc;
        }
    }

    const MultiIndex& base() const noexcept { return base_; }
    /// Coefficient for the subset encoded as a bitmask; index 0 is sigma(m).
    cplx coefficient(unsigned mask) const { return coeffs_.at(mask); }
    cplx corner_value(unsigned mask) const { return corners_.at(mask); }
    std::size_t k() const noexcept { return base_.size(); }

    bool covers(std::span<const double> x) const {
        for (std::size_t j = 0; j < k(); ++j) {
            double lo = static_cast<double>(base_[j]);
            if (!(x[j] >= lo && x[j] <= lo + 1.0)) return false;
        }
        return true;
    }

    std::vector<double> fractions(std::span<const double> x) const {
        std::vector<double> t(k());
        for (std::size_t j = 0; j < k(); ++j) t[j] = detail::sqrt_fraction(x[j], base_[j]);
        return t;
    }

    /// f_m(x) = sum_S a_S(m) prod_{i in S} t_i(x)
    cplx value(std::span<const double> x) const {
        double t[max_extension_arity];
        for (std::size_t j = 0; j < k(); ++j) t[j] = detail::sqrt_fraction(x[j], base_[j]);
        cplx acc = coeffs_[0];
        for (unsigned s = 1; s < coeffs_.size(); ++s) {
            double p = 1.0;
            for (std::size_t j = 0; j < k(); ++j)
                if (s & (1u << j)) p *= t[j];
            acc += coeffs_[s] * p;
        }
        return acc;
    }

private:
    MultiIndex base_;
    std::vector<cplx> corners_;
    std::vector<cplx> coeffs_;
};

inline MultiIndex base_cell(std::span<const double> x) {
    MultiIndex m(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= 0.0) || !std::isfinite(x[j])) throw ParameterError("extension needs finite nonnegative coordinates");
        m[j] = static_cast<std::int64_t>(std::floor(x[j]));
    }
    return m;
}

/// f(x) with the base cell floor(x).
inline cplx extend_eval(const LatticeFunction& sigma, std::span<const double> x) {
    if (x.size() != sigma.arity()) throw ArityError("point dimension does not match the lattice function");
    return CellEvaluation(sigma, base_cell(x)).value(x);
}

/// f_m(x) for an explicitly chosen closed cell containing x.
inline cplx extend_eval_in_cell(const LatticeFunction& sigma, MultiIndex m, std::span<const double> x) {
    if (x.size() != sigma.arity() || m.size() != sigma.arity())
        throw ArityError("point dimension does not match the lattice function");
    CellEvaluation cell(sigma, std::move(m));
    if (!cell.covers(x)) throw ParameterError("point lies outside the requested cell");
    return cell.value(x);
}

/// Reusable evaluator that keeps the most recent cell.
class Extension {
public:
    explicit Extension(const LatticeFunction& sigma) : sigma_(&sigma) {}

    cplx operator()(std::span<const double> x) {
        auto m = base_cell(x);
        if (!cell_ || cell_->base() != m) cell_.emplace(*sigma_, std::move(m));
        return cell_->value(x);
    }

private:
    const LatticeFunction* sigma_;
    std::optional<CellEvaluation> cell_;
};

/// B-coefficients of x in the cell of m, indexed by corner bitmask (index 0
/// is B_0), so that f(x) = sum_T B_T sigma(m + e_T). Computed from the
/// alternating expansion B_T = sum_{S >= T} (-1)^{|S|-|T|} prod_{i in S} t_i.
inline std::vector<double> b_coefficients(const LatticeFunction& sigma, std::span<const std::int64_t> m,
                                          std::span<const double> x) {
    const std::size_t k = sigma.arity();
    if (m.size() != k || x.size() != k) throw ArityError("B-coefficient arguments do not match the arity");
    if (k > max_extension_arity) throw UnsupportedError("extension is capped at k = 10");
    for (std::size_t j = 0; j < k; ++j) {
        double lo = static_cast<double>(m[j]);
        if (!(x[j] >= lo && x[j] <= lo + 1.0)) throw ParameterError("point lies outside the cell");
    }
    std::vector<double> t(k);
    for (std::size_t j = 0; j < k; ++j) t[j] = detail::sqrt_fraction(x[j], m[j]);
    const unsigned full = 1u << k;
    std::vector<double> prod(full);
    for (unsigned s = 0; s < full; ++s) {
        double p = 1.0;
        for (std::size_t j = 0; j < k; ++j)
            if (s & (1u << j)) p *= t[j];
        prod[s] = p;
    }
    std::vector<double> b(full, 0.0);
    const unsigned all = full - 1;
    for (unsigned tm = 0; tm < full; ++tm) {
        const unsigned free = all & ~tm;
        double acc = 0.0;
        for (unsigned e = free;; e = (e - 1) & free) {
            acc += (std::popcount(e) % 2 == 0 ? 1.0 : -1.0) * prod[tm | e];
            if (e == 0) break;
        }
        b[tm] = acc;
    }
    return b;
}

/// prod_{i in T} t_i prod_{i not in T} (1 - t_i), the factored form.
inline std::vector<double> b_coefficients_product(std::span<const std::int64_t> m, std::span<const double> x) {
    const std::size_t k = m.size();
    std::vector<double> t(k);
    for (std::size_t j = 0; j < k; ++j) t[j] = detail::sqrt_fraction(x[j], m[j]);
    std::vector<double> b(std::size_t{1} << k);
    for (unsigned s = 0; s < b.size(); ++s) {
        double p = 1.0;
        for (std::size_t j = 0; j < k; ++j) p *= (s & (1u << j)) ? t[j] : 1.0 - t[j];
        b[s] = p;
    }
    return b;
}

/// A_k = k! sum_{l=1}^k 2^{l-1} / ((l-1)! (k-l)!)
inline double extension_constant(int k) {
    if (k < 1) throw ParameterError("A_k needs k >= 1");
    double acc = 0.0;
    for (int l = 1; l <= k; ++l)
        acc += std::exp((l - 1) * std::log(2.0) - std::lgamma(l) - std::lgamma(k - l + 1.0));
    return std::round(std::exp(std::lgamma(k + 1.0)) * acc);
}

/// Right-hand side 2 A_k max{2 |sigma| sqrt(delta), omega(sqrt delta)} + omega(delta).
inline double extension_continuity_bound(int k, double sup, double omega_delta, double omega_sqrt_delta,
                                         double delta) {
    return 2.0 * extension_constant(k) * std::max(2.0 * sup * std::sqrt(delta), omega_sqrt_delta) + omega_delta;
}

/// |prod a_i - prod b_i| and sum |a_i - b_i| for tuples in the closed unit disc.
inline std::pair<double, double> product_difference(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw ArityError("tuples must have equal length");
    cplx pa = 1.0, pb = 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa *= a[i];
        pb *= b[i];
        s += std::abs(a[i] - b[i]);
    }
    return {std::abs(pa - pb), s};
}

}  // namespace qrt
