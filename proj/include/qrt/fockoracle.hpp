#pragma once

// Monte Carlo estimates of Toeplitz matrix entries <T_phi q_alpha, q_beta>
// on the monomial basis of the Fock space, independent of the Gamma formula.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrt/errors.hpp"
#include "qrt/quad.hpp"
#include "qrt/spectrum.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

using FockSymbol = std::function<cplx(std::span<const cplx>)>;

/// phi(z) = a(|z_(1)|, ..., |z_(k)|) for the blocks of the partition.
inline FockSymbol fock_symbol(const QuasiRadialSymbol& a, const Partition& n) {
    if (!a.conforms(n.k())) throw ArityError("symbol arity does not match the partition");
    std::vector<int> parts(n.parts().begin(), n.parts().end());
    return [a, parts](std::span<const cplx> z) {
        double s[16];
        std::vector<double> big;
        double* p = s;
        if (parts.size() > 16) {
            big.resize(parts.size());
            p = big.data();
        }
        std::size_t pos = 0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            double r2 = 0.0;
            for (int i = 0; i < parts[j]; ++i, ++pos) r2 += std::norm(z[pos]);
            p[j] = std::sqrt(r2);
        }
        return a.eval_unchecked(std::span<const double>(p, parts.size()));
    };
}

using BasisIndex = std::vector<int>;

/// (|alpha_(1)|, ..., |alpha_(k)|)
inline std::vector<int> degree_profile(const BasisIndex& alpha, const Partition& n) {
    if (alpha.size() != static_cast<std::size_t>(n.total())) throw ArityError("basis index does not conform to the partition");
    std::vector<int> prof(n.k(), 0);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n.k(); ++j)
        for (int i = 0; i < n[j]; ++i, ++pos) prof[j] += alpha[pos];
    return prof;
}

inline double log_factorial_multi(const BasisIndex& alpha) {
    double acc = 0.0;
    for (int a : alpha) acc += std::lgamma(a + 1.0);
    return acc;
}

/// q_alpha(z) = z^alpha / sqrt(alpha!)
inline cplx monomial_eval(const BasisIndex& alpha, std::span<const cplx> z) {
    if (alpha.size() != z.size()) throw ArityError("basis index and point dimensions differ");
    cplx p = 1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (alpha[j] < 0) throw ParameterError("basis index entries must be nonnegative");
        for (int e = 0; e < alpha[j]; ++e) p *= z[j];
    }
    return p * std::exp(-0.5 * log_factorial_multi(alpha));
}

inline constexpr std::size_t default_basis_cap = 10'000;

/// All alpha in N_0^n with |alpha| <= max_degree, by degree then lexicographically.
inline std::vector<BasisIndex> enumerate_basis(int n, int max_degree, std::size_t cap = default_basis_cap) {
    if (n < 1 || max_degree < 0) throw ParameterError("basis enumeration needs n >= 1 and degree >= 0");
    std::vector<BasisIndex> out;
    BasisIndex a(static_cast<std::size_t>(n), 0);
    for (int d = 0; d <= max_degree; ++d) {
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1) {
                a[static_cast<std::size_t>(pos)] = left;
                out.push_back(a);
                if (out.size() > cap) throw ResourceError("basis enumeration exceeds the cap");
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, left - v);
            }
        };
        rec(0, d);
    }
    return out;
}

/// Estimate of int phi q_alpha conj(q_beta) d lambda_n.
inline McEstimate toeplitz_entry(const FockSymbol& phi, const Partition& n, const BasisIndex& alpha,
                                 const BasisIndex& beta, std::uint64_t samples, std::uint64_t seed) {
    degree_profile(alpha, n);
    degree_profile(beta, n);
    if (samples < 10'000) throw ParameterError("Toeplitz entries need at least 10^4 samples");
    return gaussian_mc(
        [&](std::span<const cplx> z) { return phi(z) * monomial_eval(alpha, z) * std::conj(monomial_eval(beta, z)); },
        static_cast<std::size_t>(n.total()), samples, seed);
}

struct BlockSummary {
    std::vector<int> profile;
    std::size_t size = 0;
    double spread = 0.0;         // max |d_alpha - d_beta| within the block
    double spread_ratio = 0.0;   // max of |d_alpha - d_beta| / stderr(d_alpha - d_beta)
    double spread_stderr = 0.0;  // stderr of the difference attaining spread_ratio
    cplx diag_mean = 0.0;
    double diag_stderr = 0.0;  // largest stderr among the block's diagonal entries
    std::optional<cplx> gamma;
    double gamma_ratio = 0.0;  // max |d_alpha - gamma| / stderr(d_alpha)
};

struct BlockReport {
    double max_offdiag = 0.0;
    double max_offdiag_ratio = 0.0;
    BasisIndex offdiag_alpha, offdiag_beta;
    std::size_t basis_size = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<BlockSummary> blocks;

    double max_spread_ratio() const {
        double r = 0.0;
        for (const auto& b : blocks) r = std::max(r, b.spread_ratio);
        return r;
    }
    double max_gamma_ratio() const {
        double r = 0.0;
        for (const auto& b : blocks) r = std::max(r, b.gamma_ratio);
        return r;
    }
    /// Block-scalar action within `sigmas` standard errors.
    bool block_scalar(double sigmas = 4.0) const {
        return max_offdiag_ratio <= sigmas && max_spread_ratio() <= sigmas;
    }

    json to_json() const {
        json blocks_json = json::array();
        for (const auto& b : blocks) {
            json j = {{"profile", b.profile},
                      {"size", b.size},
                      {"spread", b.spread},
                      {"spread_ratio", b.spread_ratio},
                      {"diag_mean", detail::complex_to_json(b.diag_mean)},
                      {"diag_stderr", b.diag_stderr}};
            if (b.gamma) {
                j["gamma"] = detail::complex_to_json(*b.gamma);
                j["gamma_ratio"] = b.gamma_ratio;
            }
            blocks_json.push_back(std::move(j));
        }
        return {{"max_offdiag", max_offdiag},
                {"max_offdiag_ratio", max_offdiag_ratio},
                {"offdiag_witness", {{"alpha", offdiag_alpha}, {"beta", offdiag_beta}}},
                {"basis_size", basis_size},
                {"samples", samples},
                {"seed", seed},
                {"blocks", blocks_json}};
    }
};

/// All entries with |alpha|, |beta| <= max_degree from one shared sample
/// stream. Within-block differences of diagonal entries are estimated as
/// their own outputs so their standard errors include the correlation.
inline BlockReport diagonalization_report(const FockSymbol& phi, const Partition& n, int max_degree,
                                          std::uint64_t samples, std::uint64_t seed,
                                          const QuasiRadialSymbol* reference = nullptr,
                                          std::size_t basis_cap = default_basis_cap) {
    if (max_degree < 1) throw ParameterError("diagonalization report needs max_degree >= 1");
    const int dim = n.total();
    auto basis = enumerate_basis(dim, max_degree, basis_cap);
    const std::size_t nb = basis.size();

    std::map<std::vector<int>, std::vector<std::size_t>> by_profile;
    for (std::size_t i = 0; i < nb; ++i) by_profile[degree_profile(basis[i], n)].push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> diffs;
    for (const auto& [prof, members] : by_profile)
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) diffs.emplace_back(members[a], members[b]);

    std::vector<double> scale(nb);
    for (std::size_t i = 0; i < nb; ++i) scale[i] = std::exp(-0.5 * log_factorial_multi(basis[i]));
    const std::size_t entries = nb * nb;
    const std::size_t outputs = entries + diffs.size();

    auto est = gaussian_mc_multi(
        static_cast<std::size_t>(dim), outputs, samples, seed, [&](std::span<const cplx> z, std::span<cplx> out) {
            std::vector<std::vector<cplx>> pw(static_cast<std::size_t>(dim),
                                              std::vector<cplx>(static_cast<std::size_t>(max_degree) + 1));
            for (std::size_t j = 0; j < pw.size(); ++j) {
                pw[j][0] = 1.0;
                for (int e = 1; e <= max_degree; ++e) pw[j][static_cast<std::size_t>(e)] = pw[j][static_cast<std::size_t>(e) - 1] * z[j];
            }
            std::vector<cplx> q(nb);
            for (std::size_t i = 0; i < nb; ++i) {
                cplx p = scale[i];
                for (std::size_t j = 0; j < pw.size(); ++j) p *= pw[j][static_cast<std::size_t>(basis[i][j])];
                q[i] = p;
            }
            const cplx f = phi(z);
            std::vector<cplx> fq(nb);
            for (std::size_t i = 0; i < nb; ++i) fq[i] = f * q[i];
            for (std::size_t a = 0; a < nb; ++a)
                for (std::size_t b = 0; b < nb; ++b) out[a * nb + b] = fq[a] * std::conj(q[b]);
            for (std::size_t d = 0; d < diffs.size(); ++d)
                out[entries + d] = out[diffs[d].first * nb + diffs[d].first] - out[diffs[d].second * nb + diffs[d].second];
        });

    BlockReport rep;
    rep.basis_size = nb;
    rep.samples = samples;
    rep.seed = seed;
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            if (a == b) continue;
            const auto& e = est[a * nb + b];
            double mag = std::abs(e.mean);
            double ratio = e.std_error > 0.0 ? mag / e.std_error : (mag > 0.0 ? INFINITY : 0.0);
            rep.max_offdiag = std::max(rep.max_offdiag, mag);
            if (ratio > rep.max_offdiag_ratio || rep.offdiag_alpha.empty()) {
                rep.max_offdiag_ratio = ratio;
                rep.offdiag_alpha = basis[a];
                rep.offdiag_beta = basis[b];
            }
        }
    std::size_t d = 0;
    for (const auto& [prof, members] : by_profile) {
        BlockSummary s;
        s.profile = prof;
        s.size = members.size();
        cplx sum = 0.0;
        std::optional<cplx> gamma;
        if (reference) {
            MultiIndex m(prof.begin(), prof.end());
            gamma = eigenvalue(*reference, n, m);
            s.gamma = gamma;
        }
        for (auto i : members) {
            const auto& e = est[i * nb + i];
            sum += e.mean;
            s.diag_stderr = std::max(s.diag_stderr, e.std_error);
            if (gamma) {
                double dev = std::abs(e.mean - *gamma);
                s.gamma_ratio = std::max(s.gamma_ratio, e.std_error > 0.0 ? dev / e.std_error : (dev > 1e-12 ? INFINITY : 0.0));
            }
        }
        s.diag_mean = sum / static_cast<double>(members.size());
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b, ++d) {
                const auto& e = est[entries + d];
                double mag = std::abs(e.mean);
                s.spread = std::max(s.spread, mag);
                double ratio = e.std_error > 0.0 ? mag / e.std_error : (mag > 1e-12 ? INFINITY : 0.0);
                if (ratio >= s.spread_ratio) {
                    s.spread_ratio = ratio;
                    s.spread_stderr = e.std_error;
                }
            }
        rep.blocks.push_back(std::move(s));
    }
    return rep;
}

/// Estimate of int_{S^{2q-1}} |omega^alpha|^2 d sigma from normalized Gaussians.
inline McEstimate sphere_monomial_norm(const std::vector<int>& alpha, int q, std::uint64_t samples,
                                       std::uint64_t seed) {
    if (q < 1) throw ParameterError("sphere dimension needs q >= 1");
    if (alpha.size() != static_cast<std::size_t>(q)) throw ArityError("multi-index length must equal q");
    const double area = 2.0 * std::pow(std::numbers::pi, q) / std::tgamma(static_cast<double>(q));
    auto e = gaussian_mc(
        [&](std::span<const cplx> z) {
            double r2 = 0.0;
            for (auto v : z) r2 += std::norm(v);
            double r = std::sqrt(r2);
            double p = 1.0;
            for (std::size_t j = 0; j < alpha.size(); ++j) p *= std::pow(std::abs(z[j]) / r, 2 * alpha[j]);
            return cplx(p, 0.0);
        },
        static_cast<std::size_t>(q), samples, seed);
    e.mean *= area;
    e.std_error *= area;
    return e;
}

/// 2 pi^q alpha! / Gamma(q + |alpha|)
inline double sphere_monomial_norm_exact(const std::vector<int>& alpha, int q) {
    int m = 0;
    for (int a : alpha) m += a;
    return 2.0 * std::exp(q * std::log(std::numbers::pi) + log_factorial_multi(alpha) - std::lgamma(q + m));
}

}  // namespace qrt
