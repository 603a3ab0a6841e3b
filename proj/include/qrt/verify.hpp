#pragma once

// Property suites behind `qrtoeplitz verify`. Each suite returns a JSON
// report whose bytes depend only on the configuration and seed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "qrt/density.hpp"
#include "qrt/errors.hpp"
#include "qrt/extension.hpp"
#include "qrt/fockoracle.hpp"
#include "qrt/obstruction.hpp"
#include "qrt/quad.hpp"
#include "qrt/rng.hpp"
#include "qrt/spectrum.hpp"
#include "qrt/sqrtmetric.hpp"
#include "qrt/symbol.hpp"

namespace qrt {

struct VerifyConfig {
    std::optional<QuasiRadialSymbol> symbol;
    std::optional<LatticeFunction> lattice;
    std::optional<Partition> partition;
    int order = default_order;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 7;
    QuadMode mode = QuadMode::automatic;
};

class SuiteReport {
public:
    explicit SuiteReport(std::string name) : name_(std::move(name)) {}

    bool check(const std::string& name, bool ok, json detail = json::object()) {
        json c = {{"name", name}, {"pass", ok}};
        for (auto& [key, value] : detail.items()) c[key] = value;
        checks_.push_back(std::move(c));
        pass_ = pass_ && ok;
        return ok;
    }

    const std::string& name() const noexcept { return name_; }
    bool pass() const noexcept { return pass_; }
    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(checks_.begin(), checks_.end(), [](const json& c) { return !c["pass"].get<bool>(); }));
    }
    json to_json() const { return {{"suite", name_}, {"pass", pass_}, {"checks", checks_}}; }

private:
    std::string name_;
    bool pass_ = true;
    json checks_ = json::array();
};

namespace detail {

inline std::int64_t uniform_int(CounterRng& rng, std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<std::int64_t>(std::floor(rng.uniform() * span)));
}

inline double uniform_real(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Ratio |diff| / stderr, with a zero-variance estimate judged by an absolute floor.
inline double z_score(double diff, double stderr_, double floor = 1e-12) {
    if (stderr_ > 0.0) return diff / stderr_;
    return diff <= floor ? 0.0 : INFINITY;
}

inline double rel_diff(cplx a, cplx b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline json cjson(cplx v) { return complex_to_json(v); }

struct NamedSymbol {
    std::string name;
    QuasiRadialSymbol symbol;
};

inline std::vector<NamedSymbol> test_symbols(int k) {
    using namespace sym;
    std::vector<NamedSymbol> out;
    auto add = [&](std::string name, NodePtr n) { out.push_back({std::move(name), QuasiRadialSymbol(std::move(n), k)}); };
    if (k == 1) {
        add("one", constant(1.0));
        add("box", indicator({0.0}, {1.0}));
        add("shell", indicator({2.0}, {5.0}));
        add("gauss", gauss(0, 0.3));
        add("sin", sin_of(0, 1.0));
        add("mix", sum({{0.5, cos_of(0, 2.0)}, {cplx(0.0, 0.5), sin_of(0, 0.7)}}));
        add("capped", power(0, 2.0, 1.0));
        add("steps", grid({{0.0, 1.0, 2.0, 4.0, 8.0}}, {1.0, -1.0, 0.5, cplx(0.0, 0.25)}, 0.0));
    } else if (k == 2) {
        add("one", constant(1.0));
        add("box", indicator({0.0, 0.0}, {1.0, 1.0}));
        add("gauss", product({gauss(0, 0.5), gauss(1, 0.8)}));
        add("mix", sum({{0.6, sin_of(0, 1.0)}, {0.4, cos_of(1, 1.5)}}));
        add("ring", product({indicator({1.0}, {3.0}, {0}), cos_of(1, 0.5)}));
        add("steps", grid({{0.0, 2.0, 5.0}, {0.0, 1.0, 3.0, 6.0}}, {1.0, 0.5, -0.5, cplx(0.0, 1.0), 0.25, -1.0}, 0.1));
    } else {
        throw UnsupportedError("test symbols exist for k <= 2");
    }
    return out;
}

/// One-dimensional factors on coordinate c, used for product symbols.
inline std::vector<std::function<sym::NodePtr(int)>> factor_makers() {
    using namespace sym;
    return {
        [](int c) { return indicator({0.0}, {1.0}, {c}); },
        [](int c) { return indicator({1.5}, {4.0}, {c}); },
        [](int c) { return gauss(c, 0.4); },
        [](int c) { return sin_of(c, 1.0); },
        [](int c) { return cos_of(c, 0.6); },
        [](int c) { return power(c, 1.0, 3.0); },
        [](int c) { return sum({{0.5, sin_of(c, 2.0)}, {0.5, constant(1.0)}}); },
    };
}

inline Partition random_partition(CounterRng& rng, std::size_t k, int max_part) {
    std::vector<int> parts(k);
    for (auto& p : parts) p = static_cast<int>(uniform_int(rng, 1, max_part));
    return Partition(parts);
}

inline std::vector<cplx> random_values(CounterRng& rng, std::size_t count, bool complex_values = false) {
    std::vector<cplx> v(count);
    for (auto& x : v) x = complex_values ? cplx(uniform_real(rng, -0.7, 0.7), uniform_real(rng, -0.7, 0.7))
                                         : cplx(uniform_real(rng, -1.0, 1.0), 0.0);
    return v;
}

struct NamedLattice {
    std::string name;
    LatticeFunction sigma;
};

inline std::vector<NamedLattice> shift_test_lattices(std::uint64_t seed) {
    using namespace sym;
    CounterRng rng(seed, 0x5117);
    std::vector<NamedLattice> out;
    auto closed = [&](std::string name, NodePtr n, int arity = 1) {
        out.push_back({std::move(name), LatticeFunction::closed(std::move(n), arity)});
    };
    closed("sin_sqrt", sin_of(0, 1.0));
    closed("cos_2sqrt", cos_of(0, 2.0));
    closed("sin_half_sqrt", sin_of(0, 0.5));
    closed("decay", gauss(0, 0.1));
    closed("decay_fast", gauss(0, 0.5));
    closed("mix", sum({{0.5, sin_of(0, 3.0)}, {cplx(0.0, 0.5), cos_of(0, 1.0)}}));
    out.push_back({"spike_0", LatticeFunction::indicator({{0}})});
    out.push_back({"spikes", LatticeFunction::indicator({{3}, {7}, {100}}, 0.5)});
    out.push_back({"table_50", LatticeFunction::table({50}, random_values(rng, 50), 0.0)});
    out.push_back({"table_200", LatticeFunction::table({200}, random_values(rng, 200, true), 0.3)});
    closed("ramp", sum({{0.2, power(0, 1.0, 5.0)}}));
    closed("band", indicator({2.0}, {9.0}));
    closed("damped", product({sin_of(0, 1.0), gauss(0, 0.05)}));
    std::vector<cplx> alt(64);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    out.push_back({"alternating", LatticeFunction::table({64}, alt, 0.0)});
    closed("fast", cos_of(0, 10.0));
    closed("steps", grid({{0.0, 3.0, 6.0, 20.0}}, {1.0, -1.0, 0.5}, 0.0));
    out.push_back({"product_2d", LatticeFunction::product({LatticeFunction::closed(sin_of(0, 1.0)),
                                                          LatticeFunction::closed(cos_of(0, 1.0))})});
    closed("sum_2d", sum({{0.5, sin_of(0, 1.0)}, {0.5, cos_of(1, 2.0)}}), 2);
    out.push_back({"spikes_2d", LatticeFunction::indicator({{0, 0}, {3, 4}})});
    out.push_back({"table_2d", LatticeFunction::table({10, 10}, random_values(rng, 100), 0.0)});
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// schur: Monte Carlo Toeplitz entries against the eigenvalue formula
// ---------------------------------------------------------------------------

inline SuiteReport verify_schur(const VerifyConfig& cfg) {
    using namespace detail;
    SuiteReport rep("schur");
    const Partition n = cfg.partition.value_or(Partition::parse("2,1"));
    const std::size_t k = n.k();
    const std::uint64_t samples = std::max<std::uint64_t>(cfg.samples, 10'000);

    std::vector<NamedSymbol> invariant;
    invariant.push_back({"constant", QuasiRadialSymbol(sym::constant(1.0), static_cast<int>(k))});
    invariant.push_back({"box", QuasiRadialSymbol(sym::indicator(std::vector<double>(k, 0.0), std::vector<double>(k, 1.0)),
                                                  static_cast<int>(k))});
    std::vector<sym::NodePtr> g;
    for (std::size_t j = 0; j < k; ++j) g.push_back(sym::gauss(static_cast<int>(j), 0.5 + 0.3 * static_cast<double>(j)));
    invariant.push_back({"gaussian_radii", QuasiRadialSymbol(sym::product(g), static_cast<int>(k))});
    if (cfg.symbol) invariant.push_back({"user", *cfg.symbol});

    int degree = 4;
    auto basis_size = [&](int d) { return std::exp(std::lgamma(n.total() + d + 1.0) - std::lgamma(n.total() + 1.0) - std::lgamma(d + 1.0)); };
    while (degree > 1 && basis_size(degree) > 70.5) --degree;

    for (std::size_t i = 0; i < invariant.size(); ++i) {
        const auto& [name, a] = invariant[i];
        if (!a.conforms(k)) {
            rep.check("conforms " + name, false, {{"error", "symbol arity does not match the partition"}});
            continue;
        }
        auto r = diagonalization_report(fock_symbol(a, n), n, degree, samples, cfg.seed + i, &a);
        json detail = {{"max_degree", degree},
                       {"max_offdiag", r.max_offdiag},
                       {"max_offdiag_ratio", r.max_offdiag_ratio},
                       {"max_spread_ratio", r.max_spread_ratio()},
                       {"max_gamma_ratio", r.max_gamma_ratio()},
                       {"report", r.to_json()}};
        rep.check("block scalar " + name, r.max_offdiag_ratio <= 4.0 && r.max_spread_ratio() <= 4.0, detail);
        rep.check("diagonal matches eigenvalue " + name, r.max_gamma_ratio() <= 4.0,
                  {{"max_gamma_ratio", r.max_gamma_ratio()}});
    }

    // Non-invariant symbols must be caught.
    {
        FockSymbol re = [](std::span<const cplx> z) { return cplx(z[0].real(), 0.0); };
        BasisIndex e1(static_cast<std::size_t>(n.total()), 0), zero(static_cast<std::size_t>(n.total()), 0);
        e1[0] = 1;
        auto e = toeplitz_entry(re, n, e1, zero, samples, cfg.seed + 101);
        double z_half = z_score(std::abs(e.mean - 0.5), e.std_error);
        double z_zero = z_score(std::abs(e.mean), e.std_error);
        rep.check("non-invariant Re(z1) entry", z_half <= 4.0 && z_zero > 6.0,
                  {{"mean", cjson(e.mean)}, {"std_error", e.std_error}, {"z_from_half", z_half}, {"z_from_zero", z_zero}});
    }
    if (n[0] >= 2) {
        FockSymbol first = [](std::span<const cplx> z) { return cplx(std::norm(z[0]), 0.0); };
        auto r = diagonalization_report(first, n, 1, samples, cfg.seed + 102);
        rep.check("non-invariant |z1|^2 spread", r.max_spread_ratio() > 6.0, {{"max_spread_ratio", r.max_spread_ratio()}});
    }

    // Entry examples.
    {
        const Partition one = Partition::ones(1);
        QuasiRadialSymbol sq(sym::power(0, 2.0, 1e6), 1);
        auto phi = fock_symbol(sq, one);
        double worst = 0.0;
        for (int m = 0; m <= 3; ++m) {
            auto e = toeplitz_entry(phi, one, {m}, {m}, samples, cfg.seed + 200 + static_cast<std::uint64_t>(m));
            worst = std::max(worst, z_score(std::abs(e.mean - static_cast<double>(m + 1)), e.std_error));
        }
        rep.check("capped |z|^2 diagonal equals m+1", worst <= 4.0, {{"max_z", worst}});

        QuasiRadialSymbol c1(sym::constant(1.0), static_cast<int>(k));
        auto id = fock_symbol(c1, n);
        BasisIndex a(static_cast<std::size_t>(n.total()), 0), b = a;
        a[0] = 2;
        b.back() = 1;
        auto d = toeplitz_entry(id, n, a, a, samples, cfg.seed + 210);
        auto o = toeplitz_entry(id, n, a, b, samples, cfg.seed + 211);
        double zd = z_score(std::abs(d.mean - 1.0), d.std_error), zo = z_score(std::abs(o.mean), o.std_error);
        rep.check("identity symbol entries", zd <= 4.0 && zo <= 4.0, {{"z_diagonal", zd}, {"z_offdiagonal", zo}});
    }

    // Norms of monomials: ||p_alpha||^2 = alpha!.
    {
        CounterRng rng(cfg.seed, 0x5C0);
        const int dim = 3;
        std::vector<BasisIndex> alphas;
        while (alphas.size() < 20) {
            BasisIndex a(dim);
            int total = 0;
            for (auto& v : a) {
                v = static_cast<int>(uniform_int(rng, 0, 6 - total));
                total += v;
            }
            alphas.push_back(a);
        }
        auto est = gaussian_mc_multi(dim, alphas.size(), samples, cfg.seed + 300,
                                     [&](std::span<const cplx> z, std::span<cplx> out) {
                                         for (std::size_t i = 0; i < alphas.size(); ++i) {
                                             double p = 1.0;
                                             for (int j = 0; j < dim; ++j) p *= std::pow(std::norm(z[j]), alphas[i][j]);
                                             out[i] = p;
                                         }
                                     });
        double worst = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i)
            worst = std::max(worst, z_score(std::abs(est[i].mean - std::exp(log_factorial_multi(alphas[i]))), est[i].std_error));
        rep.check("monomial norms equal alpha!", worst <= 4.0, {{"max_z", worst}});
    }

    // Sphere norms.
    {
        struct Case {
            std::vector<int> alpha;
            int q;
        };
        std::vector<Case> cases = {{{0}, 1}, {{1}, 1}, {{1, 0}, 2}, {{2, 1}, 2}, {{1, 0, 2}, 3}};
        double worst = 0.0;
        json values = json::array();
        for (std::size_t i = 0; i < cases.size(); ++i) {
            auto e = sphere_monomial_norm(cases[i].alpha, cases[i].q, samples, cfg.seed + 400 + i);
            double exact = sphere_monomial_norm_exact(cases[i].alpha, cases[i].q);
            worst = std::max(worst, z_score(std::abs(e.mean - exact), e.std_error, 1e-12 * exact));
            values.push_back({{"alpha", cases[i].alpha}, {"q", cases[i].q}, {"mc", e.mean.real()}, {"exact", exact}});
        }
        rep.check("sphere monomial norms", worst <= 4.0, {{"max_z", worst}, {"cases", values}});
    }

    // Oracle equivalence: Gauss-Laguerre against Gamma sampling.
    {
        CounterRng rng(cfg.seed, 0x0AC1E);
        auto s1 = test_symbols(1), s2 = test_symbols(2);
        double worst = 0.0;
        json witness;
        for (int t = 0; t < 50; ++t) {
            std::size_t kk = static_cast<std::size_t>(uniform_int(rng, 1, 2));
            const auto& pool = kk == 1 ? s1 : s2;
            const auto& s = pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))];
            Partition nn = random_partition(rng, kk, 3);
            MultiIndex m(kk);
            for (auto& v : m) v = uniform_int(rng, 0, 50);
            auto q = eigenvalue_ex(s.symbol, nn, m, cfg.order, cfg.mode);
            auto shape = shapes_for(nn, m);
            auto mc = gamma_mc(s.symbol, shape, samples, cfg.seed + 1000 + static_cast<std::uint64_t>(t));
            // A sample set with no hits still resolves the mean to one sample's weight.
            double se = std::max(mc.std_error, s.symbol.declared_sup() / static_cast<double>(samples));
            double z = z_score(std::max(0.0, std::abs(q.value - mc.mean) - q.error), se);
            if (z >= worst) {
                worst = z;
                witness = {{"symbol", s.name}, {"partition", nn.parts()}, {"m", m}, {"quadrature", cjson(q.value)},
                           {"monte_carlo", cjson(mc.mean)}, {"std_error", se}};
            }
        }
        rep.check("quadrature agrees with Gamma sampling", worst <= 4.0, {{"max_z", worst}, {"witness", witness}});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// lipschitz: eigenvalue identities, closed forms and the Lipschitz bound
// ---------------------------------------------------------------------------

inline SuiteReport verify_lipschitz(const VerifyConfig& cfg) {
    using namespace detail;
    SuiteReport rep("lipschitz");

    // Quadrature rule exactness.
    {
        double worst = 0.0;
        for (double alpha : {0.0, 2.5, 50.0, 500.0})
            for (int q : {5, 20, 80}) {
                const auto& r = *RuleCache::global().get(alpha, q);
                for (int p = 0; p <= 2 * q - 1; ++p) {
                    // E[R^p] / (Gamma(alpha+p+1)/Gamma(alpha+1)) in log space.
                    double log_exact = std::lgamma(alpha + p + 1.0) - std::lgamma(alpha + 1.0);
                    double acc = 0.0;
                    for (int i = 0; i < q; ++i) acc += r.weights[i] * std::exp(p * std::log(r.nodes[i]) - log_exact);
                    worst = std::max(worst, std::abs(acc - 1.0));
                }
            }
        rep.check("Gauss-Laguerre exactness", worst <= 1e-12, {{"max_rel_error", worst}});
    }

    // Closed forms.
    {
        const auto ones = Partition::ones(1);
        QuasiRadialSymbol box(sym::indicator({0.0}, {1.0}), 1);
        QuasiRadialSymbol sq(sym::power(0, 2.0, 1e6), 1);
        double worst_box = 0.0, worst_pow = 0.0;
        for (std::int64_t m = 0; m <= 300; ++m) {
            double p = boost::math::gamma_p(static_cast<double>(m) + 1.0, 1.0);
            worst_box = std::max(worst_box, std::abs(eigenvalue(box, ones, {m}, cfg.order, cfg.mode) - p));
            worst_pow = std::max(worst_pow, std::abs(eigenvalue(sq, ones, {m}, cfg.order, cfg.mode) - static_cast<double>(m + 1)));
        }
        rep.check("box symbol equals P(m+1, 1)", worst_box <= 1e-10, {{"max_error", worst_box}});
        rep.check("capped square equals m+1", worst_pow <= 1e-10, {{"max_error", worst_pow}});

        const double e1 = std::exp(-1.0);
        QuasiRadialSymbol box2(sym::indicator({0.0, 0.0}, {1.0, 1.0}), 2);
        double v21 = std::abs(eigenvalue(box2, Partition::parse("2,1"), {0, 0}) - (1.0 - 2.0 * e1) * (1.0 - e1));
        double v3 = std::abs(eigenvalue(box, Partition::parse("3"), {0}) - (1.0 - 2.5 * e1));
        double v4 = std::abs(eigenvalue(sq, Partition::parse("4"), {0}) - 4.0);
        rep.check("incomplete gamma examples", std::max({v21, v3, v4}) <= 1e-12,
                  {{"n21_box", v21}, {"n3_box", v3}, {"shape4_square", v4}});

        double shape = 1.0;
        auto r = gamma_expectation_ex(box, std::span<const double>(&shape, 1), cfg.order, QuadMode::adaptive);
        double dev = std::abs(r.value - (1.0 - e1));
        rep.check("adaptive error bound is sound", dev <= r.error, {{"deviation", dev}, {"reported_error", r.error}});
    }

    // Shift identity and product factorization.
    {
        CounterRng rng(cfg.seed, 0x5A1F7);
        auto s1 = test_symbols(1), s2 = test_symbols(2);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            std::size_t kk = static_cast<std::size_t>(uniform_int(rng, 1, 2));
            const auto& pool = kk == 1 ? s1 : s2;
            const auto& s = pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))];
            Partition nn = random_partition(rng, kk, 4);
            MultiIndex m(kk), mr(kk);
            for (std::size_t j = 0; j < kk; ++j) {
                m[j] = uniform_int(rng, 0, 60);
                mr[j] = m[j] + nn[j] - 1;
            }
            auto lhs = eigenvalue(s.symbol, nn, m, cfg.order, cfg.mode);
            auto rhs = eigenvalue(s.symbol, Partition::ones(kk), mr, cfg.order, cfg.mode);
            worst = std::max(worst, rel_diff(lhs, rhs));
        }
        rep.check("shift identity", worst <= 1e-12, {{"max_rel_error", worst}});

        auto makers = factor_makers();
        double worst_p = 0.0;
        for (int t = 0; t < 100; ++t) {
            auto i1 = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(makers.size()) - 1));
            auto i2 = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(makers.size()) - 1));
            QuasiRadialSymbol a(sym::product({makers[i1](0), makers[i2](1)}), 2);
            QuasiRadialSymbol a1(makers[i1](0), 1), a2(makers[i2](0), 1);
            Partition nn = random_partition(rng, 2, 3);
            std::int64_t m1 = uniform_int(rng, 0, 50), m2 = uniform_int(rng, 0, 50);
            auto lhs = eigenvalue(a, nn, {m1, m2}, cfg.order, QuadMode::adaptive);
            auto rhs = eigenvalue(a1, Partition::ones(1), {m1 + nn[0] - 1}, cfg.order, QuadMode::adaptive) *
                       eigenvalue(a2, Partition::ones(1), {m2 + nn[1] - 1}, cfg.order, QuadMode::adaptive);
            worst_p = std::max(worst_p, rel_diff(lhs, rhs));
        }
        rep.check("product factorization", worst_p <= 1e-10, {{"max_rel_error", worst_p}});
    }

    // Lipschitz bound on eigenvalue tables.
    {
        std::vector<NamedSymbol> symbols;
        if (cfg.symbol) {
            symbols.push_back({"user", *cfg.symbol});
        } else {
            for (auto& s : test_symbols(1)) symbols.push_back({"k1_" + s.name, s.symbol});
            for (auto& s : test_symbols(2)) symbols.push_back({"k2_" + s.name, s.symbol});
        }
        for (const auto& [name, a] : symbols) {
            const std::size_t kk = a.arity();
            if (kk > 2) {
                rep.check("lipschitz " + name, false, {{"error", "tables are limited to k <= 2"}});
                continue;
            }
            Partition nn = cfg.partition && cfg.partition->k() == kk ? *cfg.partition : Partition::ones(kk);
            auto t = eigen_table(a, nn, MultiIndex(kk, 200), cfg.order, cfg.mode);
            auto c = lipschitz_certificate(t);
            const double bound = lipschitz_constant * a.declared_sup();
            json detail = {{"max_ratio", c.max_ratio}, {"bound", bound}, {"witness", {c.witness_a, c.witness_b}},
                           {"partition", nn.parts()}};
            bool ok = c.max_ratio <= bound + 1e-9;
            if (kk == 1) {
                auto ex = lipschitz_certificate_exhaustive(t);
                detail["exhaustive_ratio"] = ex.max_ratio;
                ok = ok && std::abs(ex.max_ratio - c.max_ratio) <= 1e-12 * std::max(1.0, c.max_ratio);
            }
            rep.check("lipschitz " + name, ok, detail);

            bool bounded = true, real_ok = true, positive_ok = true;
            for (std::size_t f = 0; f < t.size(); ++f) {
                bounded = bounded && std::abs(t.values[f]) <= a.declared_sup() + t.errors[f];
                if (a.is_real()) real_ok = real_ok && std::abs(t.values[f].imag()) <= 1e-14;
                if (a.is_nonnegative()) positive_ok = positive_ok && t.values[f].real() >= 0.0;
            }
            rep.check("table bounds " + name, bounded && real_ok && positive_ok,
                      {{"bounded", bounded}, {"real", real_ok}, {"nonnegative", positive_ok}});
        }
    }

    // Kernel distances.
    {
        double worst_closed = 0.0, worst_bound = 0.0;
        std::int64_t witness = 0;
        for (std::int64_t m = 1; m <= 10'000; ++m) {
            double c = kernel_l1_adjacent(m);
            worst_closed = std::max(worst_closed, std::abs(kernel_l1_distance(m, m - 1) - c));
            double ratio = c / std::sqrt(2.0 / (std::numbers::pi * static_cast<double>(m)));
            if (ratio > worst_bound) {
                worst_bound = ratio;
                witness = m;
            }
        }
        rep.check("adjacent kernel distance closed form", worst_closed <= 1e-10, {{"max_error", worst_closed}});
        rep.check("adjacent kernel distance bound", worst_bound <= 1.0, {{"max_ratio", worst_bound}, {"witness", witness}});
        double ex = std::abs(kernel_l1_distance(1, 0) - 2.0 * std::exp(-1.0));
        rep.check("kernel distance (1, 0)", ex <= 1e-12 && kernel_l1_distance(5, 5) == 0.0, {{"error", ex}});

        CounterRng rng(cfg.seed, 0x7E1E);
        double worst_tel = -INFINITY, worst_lip = -INFINITY, worst_sym = 0.0;
        for (int t = 0; t < 1000; ++t) {
            std::int64_t a = uniform_int(rng, 0, 10'000), b = uniform_int(rng, 0, 10'000);
            if (a == b) ++b;
            double d = kernel_l1_distance(a, b);
            worst_sym = std::max(worst_sym, std::abs(d - kernel_l1_distance(b, a)));
            worst_tel = std::max(worst_tel, d - kernel_l1_telescoping(a, b));
            worst_lip = std::max(worst_lip, d - lipschitz_constant * sqrt_gap(a, b));
        }
        rep.check("telescoping bound", worst_tel <= 1e-10 && worst_sym == 0.0,
                  {{"max_excess", worst_tel}, {"max_asymmetry", worst_sym}});
        rep.check("kernel Lipschitz bound", worst_lip <= 1e-10, {{"max_excess", worst_lip}});

        double worst_prod = -INFINITY;
        for (int t = 0; t < 50; ++t) {
            MultiIndex m = {uniform_int(rng, 0, 200), uniform_int(rng, 0, 200)};
            MultiIndex mp = {uniform_int(rng, 0, 200), uniform_int(rng, 0, 200)};
            double lhs = product_kernel_l1_distance(m, mp);
            double rhs = kernel_l1_distance(m[0], mp[0]) + kernel_l1_distance(m[1], mp[1]);
            worst_prod = std::max(worst_prod, lhs - rhs);
        }
        rep.check("product kernel bound", worst_prod <= 1e-10, {{"max_excess", worst_prod}});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// shifts: square-root metric, modulus and shift operators
// ---------------------------------------------------------------------------

inline SuiteReport verify_shifts(const VerifyConfig& cfg) {
    using namespace detail;
    SuiteReport rep("shifts");

    {
        bool ok = rho({0, 0}, {1, 4}) == 3.0 && rho({4}, {9}) == 1.0 && rho({7, 3}, {7, 3}) == 0.0;
        CounterRng rng(cfg.seed, 0x7210);
        double worst = -INFINITY;
        bool symmetric = true;
        for (int t = 0; t < 100'000; ++t) {
            MultiIndex a(3), b(3), c(3);
            for (int j = 0; j < 3; ++j) {
                a[j] = uniform_int(rng, 0, 1'000'000);
                b[j] = uniform_int(rng, 0, 1'000'000);
                c[j] = uniform_int(rng, 0, 1'000'000);
            }
            double ab = rho(a, b), bc = rho(b, c), ac = rho(a, c);
            worst = std::max(worst, (ac - ab - bc) / std::max(1.0, ab + bc));
            symmetric = symmetric && rho(b, a) == ab;
        }
        rep.check("rho examples and triangle inequality", ok && symmetric && worst <= 1e-14,
                  {{"max_rel_excess", worst}, {"symmetric", symmetric}});
    }

    {
        auto c = LatticeFunction::closed(sym::constant(0.3));
        auto spike = LatticeFunction::indicator({{0}});
        auto s = LatticeFunction::closed(sym::sin_of(0, 1.0));
        double mc = modulus(c, 1.5, Window({100}));
        double ms = modulus(spike, 1.0, Window({1}));
        double mq = modulus(s, 0.5, Window({10'000}));
        rep.check("modulus examples", mc == 0.0 && ms == 1.0 && mq <= 0.5,
                  {{"constant", mc}, {"spike", ms}, {"sin_sqrt", mq}});

        auto l2 = shift_left(s, {2});
        auto r1 = shift_right(s, {1});
        auto lr = shift_left(shift_right(s, {1}), {1});
        bool ok = l2({3}) == s({5}) && r1({0}) == cplx(0.0) && r1({4}) == s({3});
        for (std::int64_t m = 0; m < 50; ++m) ok = ok && lr({m}) == s({m});
        rep.check("shift examples", ok);
    }

    std::vector<NamedLattice> lattices;
    if (cfg.lattice)
        lattices.push_back({"user", *cfg.lattice});
    else
        lattices = shift_test_lattices(cfg.seed);

    std::vector<double> deltas;
    for (int i = 1; i <= 20; ++i) deltas.push_back(0.1 * i);

    for (const auto& [name, sigma] : lattices) {
        const std::size_t k = sigma.arity();
        if (k > 2) {
            rep.check("shift lemmas " + name, false, {{"error", "shift checks are limited to k <= 2"}});
            continue;
        }
        const Window w(MultiIndex(k, k == 1 ? 2000 : 50));
        std::vector<MultiIndex> shifts;
        if (k == 1)
            for (std::int64_t s = 1; s <= 5; ++s) shifts.push_back({s});
        else
            shifts = {{1, 0}, {0, 2}, {3, 1}, {5, 5}};

        const auto base = modulus_batch(sigma, deltas, w);
        bool monotone = std::is_sorted(base.begin(), base.end());
        double left_excess = -INFINITY, right_excess = -INFINITY, window_excess = -INFINITY;
        json left_witness, right_witness;
        std::size_t right_checks = 0;
        for (const auto& s : shifts) {
            auto wplus = w.enlarged(s);
            auto lhs = modulus_batch(shift_left(sigma, s), deltas, w);
            auto rhs = modulus_batch(sigma, deltas, wplus);
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                window_excess = std::max(window_excess, base[i] - rhs[i]);
                if (lhs[i] - rhs[i] > left_excess) {
                    left_excess = lhs[i] - rhs[i];
                    left_witness = {{"shift", s}, {"delta", deltas[i]}, {"lhs", lhs[i]}, {"rhs", rhs[i]}};
                }
            }
            const double smax = static_cast<double>(*std::max_element(s.begin(), s.end()));
            const double threshold = std::sqrt(2.0 * smax) - std::sqrt(2.0 * smax - 1.0);
            std::vector<double> small, scaled;
            for (double d : deltas)
                if (d < threshold) {
                    small.push_back(d);
                    scaled.push_back(std::sqrt(2.0) * d);
                }
            if (small.empty()) continue;
            auto rl = modulus_batch(shift_right(sigma, s), small, w);
            auto rr = modulus_batch(sigma, scaled, w);
            for (std::size_t i = 0; i < small.size(); ++i, ++right_checks)
                if (rl[i] - rr[i] > right_excess) {
                    right_excess = rl[i] - rr[i];
                    right_witness = {{"shift", s}, {"delta", small[i]}, {"lhs", rl[i]}, {"rhs", rr[i]}};
                }
        }
        rep.check("left shift contraction " + name, left_excess <= 0.0 && monotone && window_excess <= 0.0,
                  {{"max_excess", left_excess}, {"witness", left_witness}, {"window", w.bounds},
                   {"monotone_in_delta", monotone}, {"monotone_in_window", window_excess <= 0.0}});
        rep.check("right shift bound " + name, right_excess <= 0.0 && right_checks > 0,
                  {{"max_excess", right_excess}, {"witness", right_witness}, {"checked", right_checks}});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// extension: the multilinear-in-sqrt extension of lattice functions
// ---------------------------------------------------------------------------

namespace detail {

struct ExtensionGridScan {
    double grid_sup = 0.0;
    double lattice_max = 0.0;
    bool restriction_exact = true;
    std::size_t pairs = 0;
    double worst_ratio = 0.0;  // max |f(x) - f(x')| / bound over checked pairs
    double threshold = 0.0;
};

/// Scans f on the 0.01-grid of [0, 6]^k. Pairs with rho >= 1/(4 A_k^2) meet
/// the continuity bound through the sup check alone; closer pairs are
/// checked one by one.
inline ExtensionGridScan scan_extension_grid(const LatticeFunction& sigma) {
    const std::size_t k = sigma.arity();
    constexpr int steps = 600;
    ExtensionGridScan out;
    const double ak = extension_constant(static_cast<int>(k));
    out.threshold = 1.0 / (4.0 * ak * ak);
    std::vector<double> xs(steps + 1), roots(steps + 1), ts(steps + 1);
    std::vector<std::int64_t> cells(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        xs[i] = i / 100.0;
        roots[i] = std::sqrt(xs[i]);
        cells[i] = static_cast<std::int64_t>(std::floor(xs[i]));
        ts[i] = sqrt_fraction(xs[i], cells[i]);
    }
    double min_gap = INFINITY;
    for (int i = 0; i < steps; ++i) min_gap = std::min(min_gap, roots[i + 1] - roots[i]);
    const bool need_pairs = min_gap < out.threshold;

    std::size_t total = 1;
    for (std::size_t j = 0; j < k; ++j) total *= steps + 1;
    std::vector<cplx> values;
    if (need_pairs) values.resize(total);

    // Points grouped by base cell; cells 0..6 per axis.
    std::vector<std::vector<int>> members(7);
    for (int i = 0; i <= steps; ++i) members[static_cast<std::size_t>(cells[i])].push_back(i);
    std::size_t cell_count = 1;
    for (std::size_t j = 0; j < k; ++j) cell_count *= 7;
    std::vector<double> sup_part(cell_count, 0.0);
    parallel_for(cell_count, [&](std::size_t c) {
        MultiIndex base(k);
        std::size_t rest = c;
        for (std::size_t j = k; j-- > 0;) {
            base[j] = static_cast<std::int64_t>(rest % 7);
            rest /= 7;
        }
        CellEvaluation cell(sigma, base);
        const unsigned full = 1u << k;
        std::vector<cplx> coef(full);
        for (unsigned s = 0; s < full; ++s) coef[s] = cell.coefficient(s);
        std::vector<std::size_t> pos(k, 0);
        double best = 0.0;
        while (true) {
            int idx[3] = {0, 0, 0};
            for (std::size_t j = 0; j < k; ++j) idx[j] = members[static_cast<std::size_t>(base[j])][pos[j]];
            cplx v = coef[0];
            for (unsigned s = 1; s < full; ++s) {
                double p = 1.0;
                for (std::size_t j = 0; j < k; ++j)
                    if (s & (1u << j)) p *= ts[idx[j]];
                v += coef[s] * p;
            }
            best = std::max(best, std::abs(v));
            if (need_pairs) {
                std::size_t flat = 0;
                for (std::size_t j = 0; j < k; ++j) flat = flat * (steps + 1) + static_cast<std::size_t>(idx[j]);
                values[flat] = v;
            }
            std::size_t j = k;
            while (j > 0 && ++pos[j - 1] == members[static_cast<std::size_t>(base[j - 1])].size()) {
                pos[j - 1] = 0;
                --j;
            }
            if (j == 0) break;
        }
        sup_part[c] = best;
    });
    for (double v : sup_part) out.grid_sup = std::max(out.grid_sup, v);

    Window lattice_window(MultiIndex(k, 6));
    for (std::size_t f = 0; f < lattice_window.cells(); ++f) {
        auto m = lattice_window.index(f);
        std::vector<double> x(m.begin(), m.end());
        cplx fv = extend_eval(sigma, x);
        cplx sv = sigma.eval_unchecked(m);
        out.restriction_exact = out.restriction_exact && fv == sv;
        out.lattice_max = std::max(out.lattice_max, std::abs(sv));
    }

    if (need_pairs) {
        ModulusProfile omega(sigma, Window(MultiIndex(k, 7)));
        const double sup = sigma.declared_sup();
        // Per-axis neighbour ranges with sqrt gap below the threshold.
        std::vector<int> hi(steps + 1);
        for (int i = 0; i <= steps; ++i) {
            int j = i;
            while (j + 1 <= steps && roots[j + 1] - roots[i] < out.threshold) ++j;
            hi[i] = j;
        }
        std::vector<int> lo(steps + 1);
        for (int i = 0; i <= steps; ++i) {
            int j = i;
            while (j - 1 >= 0 && roots[i] - roots[j - 1] < out.threshold) --j;
            lo[i] = j;
        }
        const std::size_t n1 = steps + 1;
        std::vector<std::size_t> pair_part(n1, 0);
        std::vector<double> ratio_part(n1, 0.0);
        parallel_for(n1, [&](std::size_t i0) {
            std::size_t count = 0;
            double worst = 0.0;
            auto visit = [&](std::size_t fa, std::size_t fb, double r) {
                double diff = std::abs(values[fa] - values[fb]);
                double bound = 2.0 * ak * std::max(2.0 * sup * std::sqrt(r), omega(std::sqrt(r))) + omega(r);
                ++count;
                worst = std::max(worst, bound > 0.0 ? diff / bound : (diff > 0.0 ? INFINITY : 0.0));
            };
            if (k == 1) {
                for (int j = static_cast<int>(i0) + 1; j <= hi[i0]; ++j) visit(i0, static_cast<std::size_t>(j), roots[j] - roots[i0]);
            } else if (k == 2) {
                for (std::size_t i1 = 0; i1 < n1; ++i1) {
                    std::size_t fa = i0 * n1 + i1;
                    for (int j0 = static_cast<int>(i0); j0 <= hi[i0]; ++j0) {
                        double r0 = roots[j0] - roots[i0];
                        for (int j1 = lo[i1]; j1 <= hi[i1]; ++j1) {
                            if (j0 == static_cast<int>(i0) && j1 <= static_cast<int>(i1)) continue;
                            double r = r0 + std::abs(roots[j1] - roots[i1]);
                            if (r >= out.threshold) continue;
                            visit(fa, static_cast<std::size_t>(j0) * n1 + static_cast<std::size_t>(j1), r);
                        }
                    }
                }
            } else {
                throw UnsupportedError("pairwise continuity scan is implemented for k <= 2");
            }
            pair_part[i0] = count;
            ratio_part[i0] = worst;
        });
        for (std::size_t i = 0; i < n1; ++i) {
            out.pairs += pair_part[i];
            out.worst_ratio = std::max(out.worst_ratio, ratio_part[i]);
        }
    }
    return out;
}

inline LatticeFunction random_table(CounterRng& rng, std::size_t k, std::int64_t side, bool integer,
                                    bool complex_values = false) {
    std::vector<std::int64_t> dims(k, side);
    std::size_t count = 1;
    for (std::size_t j = 0; j < k; ++j) count *= static_cast<std::size_t>(side);
    std::vector<cplx> v(count);
    for (auto& x : v) {
        if (integer)
            x = static_cast<double>(uniform_int(rng, -9, 9));
        else
            x = complex_values ? cplx(uniform_real(rng, -0.7, 0.7), uniform_real(rng, -0.7, 0.7))
                               : cplx(uniform_real(rng, -1.0, 1.0), 0.0);
    }
    return LatticeFunction::table(dims, v, 0.0);
}

}  // namespace detail

inline SuiteReport verify_extension(const VerifyConfig& cfg) {
    using namespace detail;
    SuiteReport rep("extension");
    CounterRng rng(cfg.seed, 0xE7E);

    {
        bool ok = extension_constant(1) == 1.0 && extension_constant(2) == 6.0 && extension_constant(3) == 27.0;
        rep.check("A_k values", ok, {{"A_1", extension_constant(1)}, {"A_2", extension_constant(2)}, {"A_3", extension_constant(3)}});
    }

    // Examples.
    {
        auto step = LatticeFunction::table({2}, {0.0, 1.0}, 1.0);
        double x = 0.25;
        double v = std::abs(extend_eval(step, std::span<const double>(&x, 1)) - 0.5);
        auto prod = LatticeFunction::table({3, 3}, {0, 0, 0, 0, 1, 2, 0, 2, 4}, 0.0);
        MultiIndex m00 = {0, 0};
        int s12[] = {1, 2}, s1[] = {1};
        bool c_ok = coeff(prod, m00, s12) == cplx(1.0) &&
                    coeff(step, MultiIndex{0}, s1) == step({1}) - step({0});
        auto b = b_coefficients(step, MultiIndex{0}, std::vector<double>{0.0});
        double mid = std::pow(0.5 * (std::sqrt(3.0) + 2.0), 2);
        auto bm = b_coefficients(LatticeFunction::table({5}, {0, 0, 0, 0, 0}, 0.0), MultiIndex{3}, std::vector<double>{mid});
        bool b_ok = b[0] == 1.0 && b[1] == 0.0 && std::abs(bm[0] - 0.5) <= 1e-12 && std::abs(bm[1] - 0.5) <= 1e-12;
        rep.check("extension examples", v <= 1e-15 && c_ok && b_ok, {{"sqrt_interpolation_error", v}});
    }

    // Coefficients: direct against recurrence, bit for bit on integer tables.
    {
        bool ok = true;
        std::size_t compared = 0;
        for (std::size_t k = 1; k <= 3; ++k) {
            auto sigma = random_table(rng, k, 9, true);
            for (int t = 0; t < 50; ++t) {
                MultiIndex m(k);
                for (auto& v : m) v = uniform_int(rng, 0, 7);
                CellEvaluation cell(sigma, m);
                for (unsigned mask = 1; mask < (1u << k); ++mask) {
                    std::vector<int> subset;
                    for (std::size_t j = 0; j < k; ++j)
                        if (mask & (1u << j)) subset.push_back(static_cast<int>(j) + 1);
                    cplx d = coeff(sigma, m, subset), r = coeff_recursive(sigma, m, subset);
                    ok = ok && d == r && d == cell.coefficient(mask);
                    ++compared;
                }
            }
        }
        rep.check("direct and recursive coefficients agree exactly", ok, {{"compared", compared}});
    }

    // B-coefficients.
    {
        double worst_sum = 0.0, worst_neg = 0.0, worst_rep = 0.0, worst_prod = 0.0;
        std::vector<LatticeFunction> tables;
        for (std::size_t k = 1; k <= 3; ++k) tables.push_back(random_table(rng, k, 8, false, k == 2));
        for (int t = 0; t < 10'000; ++t) {
            const auto& sigma = tables[static_cast<std::size_t>(t % 3)];
            const std::size_t k = sigma.arity();
            MultiIndex m(k);
            std::vector<double> x(k);
            for (std::size_t j = 0; j < k; ++j) {
                m[j] = uniform_int(rng, 0, 6);
                double u = rng.uniform();
                if (t % 17 == 0) u = j % 2 == 0 ? 0.0 : 1.0;
                x[j] = static_cast<double>(m[j]) + u;
            }
            auto b = b_coefficients(sigma, m, x);
            auto bp = b_coefficients_product(m, x);
            double s = 0.0;
            cplx recon = 0.0;
            for (unsigned mask = 0; mask < b.size(); ++mask) {
                s += b[mask];
                worst_neg = std::max(worst_neg, -b[mask]);
                worst_prod = std::max(worst_prod, std::abs(b[mask] - bp[mask]));
                MultiIndex c = m;
                for (std::size_t j = 0; j < k; ++j)
                    if (mask & (1u << j)) ++c[j];
                recon += b[mask] * sigma(c);
            }
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
            worst_rep = std::max(worst_rep, std::abs(recon - CellEvaluation(sigma, m).value(x)));
        }
        rep.check("B-coefficients form a partition of unity",
                  worst_sum <= 1e-12 && worst_neg <= 1e-12 && worst_rep <= 1e-12 && worst_prod <= 1e-12,
                  {{"max_sum_error", worst_sum}, {"max_negative", worst_neg}, {"max_reconstruction_error", worst_rep},
                   {"max_product_form_error", worst_prod}});
    }

    // Boundary consistency between adjacent cells.
    {
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            std::size_t k = static_cast<std::size_t>(1 + t % 3);
            auto sigma = random_table(rng, k, 8, false);
            std::vector<double> x(k);
            std::vector<bool> on_edge(k);
            for (std::size_t j = 0; j < k; ++j) {
                on_edge[j] = rng.uniform() < 0.6;
                x[j] = on_edge[j] ? static_cast<double>(uniform_int(rng, 1, 6)) : uniform_real(rng, 0.0, 7.0);
            }
            auto base = base_cell(x);
            cplx ref = extend_eval_in_cell(sigma, base, x);
            for (unsigned mask = 1; mask < (1u << k); ++mask) {
                MultiIndex m = base;
                bool valid = true;
                for (std::size_t j = 0; j < k; ++j)
                    if (mask & (1u << j)) {
                        if (!on_edge[j]) valid = false;
                        --m[j];
                    }
                if (!valid) continue;
                worst = std::max(worst, std::abs(extend_eval_in_cell(sigma, m, x) - ref));
            }
        }
        auto sigma = random_table(rng, 2, 8, true);
        std::vector<double> x = {1.0, 0.5};
        double ex = std::abs(extend_eval_in_cell(sigma, {0, 0}, x) - extend_eval_in_cell(sigma, {1, 0}, x));
        rep.check("boundary consistency", std::max(worst, ex) <= 1e-12, {{"max_error", std::max(worst, ex)}});
    }

    // Product difference lemma.
    {
        double worst = -INFINITY;
        for (int t = 0; t < 100'000; ++t) {
            std::size_t l = static_cast<std::size_t>(uniform_int(rng, 1, 8));
            std::vector<cplx> a(l), b(l);
            for (std::size_t i = 0; i < l; ++i) {
                a[i] = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
                b[i] = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
            }
            auto [lhs, rhs] = product_difference(a, b);
            worst = std::max(worst, lhs - rhs);
        }
        rep.check("product difference lemma", worst <= 1e-14, {{"max_excess", worst}});
    }

    // Grid scans on [0, 6]^k.
    {
        std::vector<NamedLattice> lattices;
        if (cfg.lattice && cfg.lattice->arity() <= 3) {
            lattices.push_back({"user", *cfg.lattice});
        } else {
            lattices.push_back({"table_k1", random_table(rng, 1, 8, false)});
            lattices.push_back({"sin_sqrt_k1", LatticeFunction::closed(sym::sin_of(0, 1.0))});
            lattices.push_back({"spike_k1", LatticeFunction::indicator({{2}})});
            lattices.push_back({"table_k2", random_table(rng, 2, 8, false, true)});
            lattices.push_back({"mix_k2", LatticeFunction::closed(sym::product({sym::sin_of(0, 1.0), sym::cos_of(1, 2.0)}))});
            lattices.push_back({"table_k3", random_table(rng, 3, 8, false)});
            lattices.push_back({"integer_k3", random_table(rng, 3, 8, true)});
        }
        for (const auto& [name, sigma] : lattices) {
            auto s = scan_extension_grid(sigma);
            const double sup = sigma.declared_sup();
            rep.check("restriction " + name, s.restriction_exact);
            rep.check("grid sup " + name, s.grid_sup <= sup + 1e-12 && s.lattice_max <= s.grid_sup,
                      {{"grid_sup", s.grid_sup}, {"lattice_max", s.lattice_max}, {"declared_sup", sup}});
            rep.check("continuity bound " + name, s.worst_ratio <= 1.0 + 1e-12 && s.grid_sup <= sup + 1e-12,
                      {{"pairs_below_threshold", s.pairs}, {"threshold", s.threshold}, {"max_ratio", s.worst_ratio}});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// density: kernels, deconvolution and symbol synthesis
// ---------------------------------------------------------------------------

inline SuiteReport verify_density(const VerifyConfig& cfg) {
    using namespace detail;
    SuiteReport rep("density");
    CounterRng rng(cfg.seed, 0xDE5);

    {
        std::vector<std::int64_t> ms = {0, 1, 10, 100, 1000, 10'000};
        json values = json::object();
        std::vector<double> g;
        for (auto m : ms) {
            g.push_back(kernel_l1_gap(m));
            values[std::to_string(m)] = g.back();
        }
        bool decreasing = g[1] > g[2] && g[2] > g[3] && g[3] > g[4];
        bool nonneg = std::all_of(g.begin(), g.end(), [](double v) { return v >= 0.0; });
        rep.check("kernel gap decreases", decreasing && nonneg && g[5] < g[1] / 5.0, {{"gap", values}});
    }

    const std::vector<GridAxis> axes1 = {GridAxis::symmetric(40.0, 4096)};
    {
        auto one = GridFunction::sample(axes1, [](std::span<const double>) { return cplx(1.0); }, 1.0);
        std::vector<std::vector<double>> pts = {{-10.0}, {0.0}, {3.3}};
        auto c1 = convolve_H(one, pts);
        double e1 = 0.0;
        for (auto v : c1) e1 = std::max(e1, std::abs(v - 1.0));
        auto hgrid = GridFunction::sample(axes1, [](std::span<const double> x) { return cplx(kernel_h(x[0])); });
        std::vector<std::vector<double>> zero = {{0.0}};
        double e2 = std::abs(convolve_H(hgrid, zero)[0] - 1.0 / std::sqrt(std::numbers::pi));

        auto f = [](std::span<const double> x) { return cplx(std::cos(0.7 * x[0]), 0.3 * std::sin(2.0 * x[0])); };
        auto b = GridFunction::sample(axes1, f);
        auto shifted = b;
        shifted.axes[0].x0 += shifted.axes[0].h;
        double e3 = 0.0;
        for (double x : {-5.0, 0.0, 2.5, 7.25}) {
            std::vector<std::vector<double>> p = {{x}}, q = {{x + b.axes[0].h}};
            e3 = std::max(e3, std::abs(convolve_H(b, p)[0] - convolve_H(shifted, q)[0]));
        }
        bool coverage = false;
        try {
            std::vector<std::vector<double>> edge = {{39.0}};
            convolve_H(b, edge);
        } catch (const CoverageError&) {
            coverage = true;
        }
        rep.check("convolution with H", e1 <= 1e-10 && e2 <= 1e-10 && e3 <= 1e-12 && coverage,
                  {{"unit_mass_error", e1}, {"h_self_error", e2}, {"translation_error", e3}, {"coverage_error_raised", coverage}});
    }

    {
        double worst = 0.0;
        for (int k = 1; k <= 2; ++k) {
            std::vector<GridAxis> ax(static_cast<std::size_t>(k), GridAxis::symmetric(10.0, k == 1 ? 4096 : 64));
            GridFunction g(ax);
            for (auto& v : g.values) v = cplx(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0));
            auto back = dft_inverse(g, dft_forward(g));
            double scale = 0.0;
            for (auto v : g.values) scale = std::max(scale, std::abs(v));
            for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - g.values[i]) / scale);
        }
        rep.check("transform round trip", worst <= 1e-10, {{"max_rel_error", worst}});
    }

    {
        const cplx c(0.7, -0.2);
        auto target = GridFunction::sample(axes1, [&](std::span<const double>) { return c; }, c);
        auto b = deconvolve_bump(target, 0.5);
        std::vector<std::vector<double>> pts;
        for (double x = -20.0; x <= 20.0; x += 0.5) pts.push_back({x});
        double e1 = 0.0;
        for (auto v : convolve_H(b, pts)) e1 = std::max(e1, std::abs(v - c));

        std::vector<GridAxis> axes2(2, GridAxis::symmetric(40.0, 512));
        auto target2 = GridFunction::sample(axes2, [&](std::span<const double>) { return c; }, c);
        auto b2 = deconvolve_bump(target2, 0.5);
        std::vector<std::vector<double>> pts2 = {{0.0, 0.0}, {-7.5, 3.0}, {12.0, -15.0}};
        for (auto v : convolve_H(b2, pts2)) e1 = std::max(e1, std::abs(v - c));

        auto sine = GridFunction::sample(axes1, [](std::span<const double> x) { return cplx(std::sin(x[0])); });
        auto err_for = [&](double t0) {
            auto bb = deconvolve_bump(sine, t0);
            auto conv = convolve_H(bb, pts);
            double e = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) e = std::max(e, std::abs(conv[i] - std::sin(pts[i][0])));
            return e;
        };
        double fine = err_for(0.5), coarse = err_for(1.0);
        bool zero_rejected = false, coarse_rejected = false;
        try {
            deconvolve_bump(sine, 0.0);
        } catch (const ParameterError&) {
            zero_rejected = true;
        }
        try {
            deconvolve_bump(sine, 0.01);
        } catch (const ParameterError&) {
            coarse_rejected = true;
        }
        rep.check("bump deconvolution", e1 <= 1e-8 && fine < coarse && zero_rejected && coarse_rejected,
                  {{"constant_error", e1}, {"sin_error_t0_0.5", fine}, {"sin_error_t0_1", coarse},
                   {"t0_zero_rejected", zero_rejected}, {"coarse_grid_rejected", coarse_rejected}});
    }

    // Restriction to the positive half-line.
    {
        auto half_tail = [](double x) { return 0.5 * std::erfc(std::sqrt(2.0) * x); };
        auto one = GridFunction::sample(axes1, [](std::span<const double>) { return cplx(1.0); });
        auto cut = GridFunction::sample(axes1, [](std::span<const double> x) { return cplx(x[0] >= 0.0 ? 1.0 : 0.0); });
        auto wave = GridFunction::sample(axes1, [](std::span<const double> x) { return cplx(0.9 * std::cos(1.3 * x[0]), 0.3); });
        auto wave_cut = wave;
        for (std::size_t i = 0; i < wave_cut.size(); ++i)
            if (wave_cut.axes[0].at(i) < 0.0) wave_cut.values[i] = 0.0;
        std::vector<std::vector<double>> pts;
        for (int x = 0; x <= 5; ++x) pts.push_back({static_cast<double>(x)});
        auto a = convolve_H(one, pts), b = convolve_H(cut, pts), c = convolve_H(wave, pts), d = convolve_H(wave_cut, pts);
        bool decreasing = true, bounded = true;
        std::vector<double> diffs;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            diffs.push_back(std::abs(a[i] - b[i]));
            if (i > 0) decreasing = decreasing && diffs[i] < diffs[i - 1];
            bounded = bounded && std::abs(c[i] - d[i]) <= half_tail(pts[i][0]) + 1e-12;
        }
        rep.check("restriction proximity", decreasing && bounded && diffs.back() < 1e-6,
                  {{"differences", diffs}, {"bounded_by_tail", bounded}});
    }

    // Eigenvalues against convolution with H at sqrt(m).
    {
        json rows = json::array();
        bool ok = true;
        for (int trial = 0; trial < 4; ++trial) {
            const std::size_t k = trial < 3 ? 1 : 2;
            std::vector<std::vector<double>> edges(k);
            std::size_t count = 1;
            for (std::size_t j = 0; j < k; ++j) {
                const int cells = k == 1 ? 40 : 12;
                const double w = k == 1 ? (trial == 2 ? 0.5 : 1.0) : 3.0;
                for (int i = 0; i <= cells; ++i) edges[j].push_back(i * w);
                count *= static_cast<std::size_t>(cells);
            }
            auto node = sym::grid(edges, random_values(rng, count), 0.0);
            QuasiRadialSymbol a(node, static_cast<int>(k));
            const auto& g = std::get<sym::Grid>(node->body);
            std::vector<double> worst;
            for (std::int64_t N : {25, 100, 400}) {
                Window w(MultiIndex(k, 20));
                std::vector<std::vector<double>> pts;
                std::vector<MultiIndex> ms;
                for (std::size_t f = 0; f < w.cells(); ++f) {
                    auto m = w.index(f);
                    for (auto& v : m) v += N;
                    std::vector<double> x;
                    for (auto v : m) x.push_back(std::sqrt(static_cast<double>(v)));
                    pts.push_back(x);
                    ms.push_back(m);
                }
                auto conv = convolve_H_symbol(g, pts);
                std::vector<double> dev(ms.size());
                detail::IntegralMemo memo;
                parallel_for(ms.size(), [&](std::size_t i) {
                    dev[i] = std::abs(eigenvalue_ex(a, Partition::ones(k), ms[i], cfg.order, QuadMode::adaptive, &memo).value - conv[i]);
                });
                worst.push_back(*std::max_element(dev.begin(), dev.end()));
            }
            bool mono = worst[1] <= worst[0] && worst[2] <= worst[1];
            ok = ok && mono;
            rows.push_back({{"k", k}, {"max_deviation", worst}, {"nonincreasing", mono}});
        }
        rep.check("eigenvalue convolution proximity", ok, {{"trials", rows}});
    }

    // Synthesis.
    {
        auto sigma = LatticeFunction::closed(sym::sin_of(0, 1.0));
        auto r = synthesize_symbol(sigma, Partition::ones(1), 0.1, {400});
        rep.check("synthesis of sin(sqrt m)", r.report.sup_residual < 0.1,
                  {{"sup_residual", r.report.sup_residual}, {"flags", r.report.flags}});

        double worst = 0.0;
        for (cplx c : {cplx(0.5), cplx(-1.25, 0.3)}) {
            auto rc = synthesize_symbol(LatticeFunction::closed(sym::constant(c), 1), Partition::ones(1), 1e-6, {200});
            worst = std::max(worst, rc.report.sup_residual);
        }
        auto r2 = synthesize_symbol(LatticeFunction::closed(sym::constant(0.75), 2), Partition::parse("2,1"), 1e-6, {20, 20});
        worst = std::max(worst, r2.report.sup_residual);
        rep.check("synthesis of constants", worst < 1e-6, {{"max_sup_residual", worst}});

        auto a0 = QuasiRadialSymbol(sym::grid({{0.0, 1.5, 3.0, 4.5, 6.0, 8.0}}, {0.8, -0.4, 0.6, 0.2, -0.9}, 0.1), 1);
        std::vector<cplx> tv(41);
        for (std::int64_t m = 0; m <= 40; ++m) tv[static_cast<std::size_t>(m)] = eigenvalue(a0, Partition::ones(1), {m});
        auto feasible = LatticeFunction::table({41}, tv, 0.0);
        auto rf = synthesize_symbol(feasible, Partition::ones(1), 1e-3, {40});
        rep.check("synthesis of a feasible target", rf.report.sup_residual <= 1e-3, {{"sup_residual", rf.report.sup_residual}});

        auto target = LatticeFunction::closed(sym::sum({{0.6, sym::sin_of(0, 1.0)}, {0.3, sym::cos_of(0, 0.4)}}));
        auto r3 = synthesize_symbol(target, Partition::parse("3"), 0.1, {100});
        auto r1 = synthesize_symbol(shift_right(target, {2}), Partition::ones(1), 0.1, {102});
        double dev = 0.0;
        for (std::size_t i = 0; i < r3.report.residuals.size(); ++i)
            dev = std::max(dev, std::abs(r3.report.residuals[i].second - r1.report.residuals[i + 2].second));
        rep.check("shift reduction", dev <= 1e-9, {{"max_difference", dev}});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// obstruction: the function g(i, j)
// ---------------------------------------------------------------------------

inline SuiteReport verify_obstruction(const VerifyConfig& cfg, const ObstructionConfig& oc = {}) {
    using namespace detail;
    SuiteReport rep("obstruction");
    CounterRng rng(cfg.seed, 0x0B5);

    {
        bool ok = g_value(5, 5) == 0.0 && std::abs(g_value(0, 4) - std::sin(2.0)) <= 1e-15 && g_value(0, 10) == 0.0 &&
                  row_separation(7, 7) == 0.0 && row_sup(0) >= 0.987 && row_separation(0, 16) >= 0.5;
        rep.check("obstruction examples", ok, {{"row_sup_0", row_sup(0)}, {"separation_0_16", row_separation(0, 16)}});
    }

    {
        double worst = -INFINITY;
        std::size_t checked = 0, excluded = 0;
        const double max_i = static_cast<double>(oc.max_i), max_j = static_cast<double>(oc.max_j);
        while (checked < oc.pairs) {
            std::int64_t i = uniform_int(rng, 0, oc.max_i), j = uniform_int(rng, 0, oc.max_j);
            // Partner within sqrt distance pi, drawn in sqrt coordinates.
            double si = std::sqrt(static_cast<double>(i)) + uniform_real(rng, -1.5, 1.5);
            double sj = std::sqrt(static_cast<double>(j)) + uniform_real(rng, -1.5, 1.5);
            std::int64_t ip = static_cast<std::int64_t>(std::llround(std::clamp(si, 0.0, std::sqrt(max_i)) * std::clamp(si, 0.0, std::sqrt(max_i))));
            std::int64_t jp = static_cast<std::int64_t>(std::llround(std::clamp(sj, 0.0, std::sqrt(max_j)) * std::clamp(sj, 0.0, std::sqrt(max_j))));
            double r = sqrt_gap(i, ip) + sqrt_gap(j, jp);
            if (!(r < std::numbers::pi)) continue;
            if (in_guard_band(i, j) || in_guard_band(ip, jp)) {
                ++excluded;
                continue;
            }
            worst = std::max(worst, std::abs(g_value(i, j) - g_value(ip, jp)) - r);
            ++checked;
        }
        rep.check("rho_2 Lipschitz witness", worst <= 1e-12,
                  {{"pairs", checked}, {"guard_band_excluded", excluded}, {"max_excess", worst}});
    }

    {
        double low = INFINITY;
        std::int64_t witness = 0;
        for (std::int64_t i = 0; i <= 10'000; ++i) {
            double v = row_sup(i);
            if (v < low) {
                low = v;
                witness = i;
            }
        }
        double low_big = INFINITY;
        for (int t = 0; t < 100; ++t) low_big = std::min(low_big, row_sup(uniform_int(rng, 0, 100'000'000)));
        double big = row_sup(1'000'000);
        rep.check("row sup at least 1/2", low >= 0.5 && low_big >= 0.5 && big >= 0.5 && row_sup(100) >= 0.5,
                  {{"min_small_rows", low}, {"witness", witness}, {"min_random_large_rows", low_big}, {"row_1e6", big}});
    }

    {
        double low = INFINITY;
        std::size_t pairs = 0;
        while (pairs < 1000) {
            std::int64_t a = uniform_int(rng, 0, 1'000'000), b = uniform_int(rng, 0, 1'000'000);
            if (!(sqrt_gap(a, b) > std::numbers::pi)) continue;
            low = std::min(low, row_separation(a, b));
            ++pairs;
        }
        rep.check("row separation at least 1/2", low >= 0.5, {{"pairs", pairs}, {"min_separation", low}});
    }

    {
        std::vector<std::int64_t> rows;
        for (std::int64_t t = 0; t < 200; ++t) rows.push_back(16 * t * t);
        auto net = greedy_net_size(rows, 0.25);
        rep.check("no finite 1/4-net among sampled rows", net == rows.size(), {{"rows", rows.size()}, {"net_size", net}});
    }
    return rep;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"schur", "lipschitz", "shifts", "extension", "density", "obstruction"};
    return names;
}

inline SuiteReport run_suite(const std::string& name, const VerifyConfig& cfg) {
    if (name == "schur") return verify_schur(cfg);
    if (name == "lipschitz") return verify_lipschitz(cfg);
    if (name == "shifts") return verify_shifts(cfg);
    if (name == "extension") return verify_extension(cfg);
    if (name == "density") return verify_density(cfg);
    if (name == "obstruction") return verify_obstruction(cfg);
    throw ParameterError("unknown suite '" + name + "'");
}

/// Runs one suite or, for "all", every suite; returns (report, pass).
inline std::pair<json, bool> run_verify(const std::string& name, const VerifyConfig& cfg) {
    if (name != "all") {
        auto r = run_suite(name, cfg);
        return {r.to_json(), r.pass()};
    }
    json suites = json::array();
    bool pass = true;
    for (const auto& s : suite_names()) {
        auto r = run_suite(s, cfg);
        pass = pass && r.pass();
        suites.push_back(r.to_json());
    }
    return {{{"suite", "all"}, {"pass", pass}, {"seed", cfg.seed}, {"samples", cfg.samples}, {"suites", suites}}, pass};
}

}  // namespace qrt
