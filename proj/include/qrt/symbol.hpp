#pragma once

// Data model for quasi-radial symbols a: R_+^k -> C and bounded lattice
// functions sigma: N_0^k -> C, with their JSON document grammar.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qrt/errors.hpp"

namespace qrt {

using cplx = std::complex<double>;
using json = nlohmann::json;
using MultiIndex = std::vector<std::int64_t>;

/// The tuple n = (n_1, ..., n_k) splitting C^n into k blocks.
class Partition {
public:
    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw ParameterError("partition needs at least one part");
        for (int p : parts_)
            if (p < 1) throw ParameterError("partition parts must be positive");
    }

    static Partition ones(std::size_t k) { return Partition(std::vector<int>(k, 1)); }

    /// Parses "2,1".
    static Partition parse(std::string_view text) {
        std::vector<int> parts;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto comma = text.find(',', pos);
            auto piece = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
            int v = 0;
            auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
            if (ec != std::errc() || ptr != piece.data() + piece.size())
                throw ParameterError("bad partition '" + std::string(text) + "'");
            parts.push_back(v);
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return Partition(std::move(parts));
    }

    std::size_t k() const noexcept { return parts_.size(); }
    int total() const noexcept {
        int n = 0;
        for (int p : parts_) n += p;
        return n;
    }
    int operator[](std::size_t i) const { return parts_[i]; }
    std::span<const int> parts() const noexcept { return parts_; }

    bool operator==(const Partition&) const = default;

private:
    std::vector<int> parts_;
};

namespace detail {

inline cplx complex_from_json(const json& j, const char* field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError(std::string("field '") + field + "' must be a number or [re, im]");
}

inline json complex_to_json(cplx v) {
    if (v.imag() == 0.0) return v.real();
    return json::array({v.real(), v.imag()});
}

inline const json& require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(std::string("missing field '") + field + "'");
    return *it;
}

inline double require_number(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number()) throw ParseError(std::string("field '") + field + "' must be a number");
    return v.get<double>();
}

inline double optional_number(const json& j, const char* field, double fallback) {
    auto it = j.find(field);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ParseError(std::string("field '") + field + "' must be a number");
    return it->get<double>();
}

inline int require_coord(const json& j) {
    const json& v = require(j, "coord");
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError("field 'coord' must be a nonnegative integer");
    return v.get<int>();
}

inline json parse_document(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Symbol expressions
// ---------------------------------------------------------------------------

namespace sym {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Const { cplx value; };
/// min(s_coord^exponent, cap)
struct Power { int coord; double exponent; double cap; };
/// Indicator of the half-open box prod [lower_i, upper_i) over `coords`.
struct Indicator {
    std::vector<int> coords;
    std::vector<double> lower, upper;
};
struct Sin { int coord; double freq; };
struct Cos { int coord; double freq; };
/// exp(-(scale * s_coord)^2)
struct Gauss { int coord; double scale; };
struct Sum { std::vector<std::pair<cplx, NodePtr>> terms; };
struct Product { std::vector<NodePtr> factors; };
/// Piecewise constant on the rectangular grid spanned by `edges` (one edge
/// list per coordinate 0..d-1), row-major values, `outside` elsewhere.
struct Grid {
    std::vector<std::vector<double>> edges;
    std::vector<cplx> values;
    cplx outside;

    std::size_t dims() const noexcept { return edges.size(); }
    std::size_t cells(std::size_t axis) const noexcept { return edges[axis].size() - 1; }

    /// Flat cell index containing s, or nullopt outside the grid.
    std::optional<std::size_t> locate(std::span<const double> s) const {
        std::size_t flat = 0;
        for (std::size_t j = 0; j < edges.size(); ++j) {
            const auto& e = edges[j];
            double x = s[j];
            if (!(x >= e.front()) || !(x < e.back())) return std::nullopt;
            auto it = std::upper_bound(e.begin(), e.end(), x);
            flat = flat * cells(j) + static_cast<std::size_t>(it - e.begin() - 1);
        }
        return flat;
    }
};

struct Node {
    std::variant<Const, Power, Indicator, Sin, Cos, Gauss, Sum, Product, Grid> body;
};

template <class T>
NodePtr make(T body) {
    return std::make_shared<const Node>(Node{std::move(body)});
}

inline NodePtr constant(cplx v) { return make(Const{v}); }
inline NodePtr power(int coord, double exponent, double cap) {
    if (!(exponent >= 0.0)) throw ParameterError("power exponent must be nonnegative");
    if (!(cap >= 0.0) || !std::isfinite(cap)) throw ParameterError("power cap must be finite and nonnegative");
    return make(Power{coord, exponent, cap});
}
inline NodePtr indicator(std::vector<double> lower, std::vector<double> upper, std::vector<int> coords = {}) {
    if (coords.empty())
        for (std::size_t i = 0; i < lower.size(); ++i) coords.push_back(static_cast<int>(i));
    if (lower.size() != upper.size() || lower.size() != coords.size() || lower.empty())
        throw ParameterError("indicator bounds must have matching nonzero lengths");
    return make(Indicator{std::move(coords), std::move(lower), std::move(upper)});
}
inline NodePtr sin_of(int coord, double freq = 1.0) { return make(Sin{coord, freq}); }
inline NodePtr cos_of(int coord, double freq = 1.0) { return make(Cos{coord, freq}); }
inline NodePtr gauss(int coord, double scale = 1.0) { return make(Gauss{coord, scale}); }
inline NodePtr sum(std::vector<std::pair<cplx, NodePtr>> terms) {
    if (terms.empty()) throw ParameterError("sum needs at least one term");
    return make(Sum{std::move(terms)});
}
inline NodePtr product(std::vector<NodePtr> factors) {
    if (factors.empty()) throw ParameterError("product needs at least one factor");
    return make(Product{std::move(factors)});
}
inline NodePtr grid(std::vector<std::vector<double>> edges, std::vector<cplx> values, cplx outside = 0.0) {
    if (edges.empty()) throw ParameterError("grid needs at least one axis");
    std::size_t cells = 1;
    for (const auto& e : edges) {
        if (e.size() < 2) throw ParameterError("grid axis needs at least two edges");
        for (std::size_t i = 1; i < e.size(); ++i)
            if (!(e[i] > e[i - 1])) throw ParameterError("grid edges must be strictly increasing");
        cells *= e.size() - 1;
    }
    if (values.size() != cells) throw ParameterError("grid value count does not match the edge lists");
    return make(Grid{std::move(edges), std::move(values), outside});
}

inline cplx eval(const Node& node, std::span<const double> s) {
    return std::visit(
        [&](const auto& n) -> cplx {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Const>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Power>) {
                return std::min(std::pow(s[n.coord], n.exponent), n.cap);
            } else if constexpr (std::is_same_v<T, Indicator>) {
                for (std::size_t i = 0; i < n.coords.size(); ++i) {
                    double x = s[n.coords[i]];
                    if (!(x >= n.lower[i] && x < n.upper[i])) return 0.0;
                }
                return 1.0;
            } else if constexpr (std::is_same_v<T, Sin>) {
                return std::sin(n.freq * s[n.coord]);
            } else if constexpr (std::is_same_v<T, Cos>) {
                return std::cos(n.freq * s[n.coord]);
            } else if constexpr (std::is_same_v<T, Gauss>) {
                double u = n.scale * s[n.coord];
                return std::exp(-u * u);
            } else if constexpr (std::is_same_v<T, Sum>) {
                cplx acc = 0.0;
                for (const auto& [w, t] : n.terms) acc += w * eval(*t, s);
                return acc;
            } else if constexpr (std::is_same_v<T, Product>) {
                cplx acc = 1.0;
                for (const auto& f : n.factors) acc *= eval(*f, s);
                return acc;
            } else {
                auto cell = n.locate(s);
                return cell ? n.values[*cell] : n.outside;
            }
        },
        node.body);
}

/// Bottom-up bound on sup |a|: exact for leaves and products, triangle
/// inequality for sums.
inline double sup_bound(const Node& node) {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Const>) {
                return std::abs(n.value);
            } else if constexpr (std::is_same_v<T, Power>) {
                return n.cap;
            } else if constexpr (std::is_same_v<T, Sum>) {
                double acc = 0.0;
                for (const auto& [w, t] : n.terms) acc += std::abs(w) * sup_bound(*t);
                return acc;
            } else if constexpr (std::is_same_v<T, Product>) {
                double acc = 1.0;
                for (const auto& f : n.factors) acc *= sup_bound(*f);
                return acc;
            } else if constexpr (std::is_same_v<T, Grid>) {
                double acc = std::abs(n.outside);
                for (cplx v : n.values) acc = std::max(acc, std::abs(v));
                return acc;
            } else {
                return 1.0;
            }
        },
        node.body);
}

/// Smallest k for which every referenced coordinate exists.
inline int required_arity(const Node& node) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Const>) {
                return 0;
            } else if constexpr (std::is_same_v<T, Indicator>) {
                return *std::max_element(n.coords.begin(), n.coords.end()) + 1;
            } else if constexpr (std::is_same_v<T, Sum>) {
                int k = 0;
                for (const auto& [w, t] : n.terms) k = std::max(k, required_arity(*t));
                return k;
            } else if constexpr (std::is_same_v<T, Product>) {
                int k = 0;
                for (const auto& f : n.factors) k = std::max(k, required_arity(*f));
                return k;
            } else if constexpr (std::is_same_v<T, Grid>) {
                return static_cast<int>(n.dims());
            } else {
                return n.coord + 1;
            }
        },
        node.body);
}

/// True when the expression has no jump discontinuities.
inline bool continuous(const Node& node) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Indicator> || std::is_same_v<T, Grid>) {
                return false;
            } else if constexpr (std::is_same_v<T, Sum>) {
                return std::all_of(n.terms.begin(), n.terms.end(), [](const auto& t) { return continuous(*t.second); });
            } else if constexpr (std::is_same_v<T, Product>) {
                return std::all_of(n.factors.begin(), n.factors.end(), [](const auto& f) { return continuous(*f); });
            } else {
                return true;
            }
        },
        node.body);
}

/// Conservative: true only when nonnegativity follows from the structure.
inline bool nonnegative(const Node& node) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            auto nonneg = [](cplx v) { return v.imag() == 0.0 && v.real() >= 0.0; };
            if constexpr (std::is_same_v<T, Const>) {
                return nonneg(n.value);
            } else if constexpr (std::is_same_v<T, Power> || std::is_same_v<T, Indicator> ||
                                 std::is_same_v<T, Gauss>) {
                return true;
            } else if constexpr (std::is_same_v<T, Sum>) {
                return std::all_of(n.terms.begin(), n.terms.end(),
                                   [&](const auto& t) { return nonneg(t.first) && nonnegative(*t.second); });
            } else if constexpr (std::is_same_v<T, Product>) {
                return std::all_of(n.factors.begin(), n.factors.end(), [](const auto& f) { return nonnegative(*f); });
            } else if constexpr (std::is_same_v<T, Grid>) {
                return nonneg(n.outside) && std::all_of(n.values.begin(), n.values.end(), nonneg);
            } else {
                return false;
            }
        },
        node.body);
}

inline bool real_valued(const Node& node) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Const>) {
                return n.value.imag() == 0.0;
            } else if constexpr (std::is_same_v<T, Sum>) {
                return std::all_of(n.terms.begin(), n.terms.end(),
                                   [](const auto& t) { return t.first.imag() == 0.0 && real_valued(*t.second); });
            } else if constexpr (std::is_same_v<T, Product>) {
                return std::all_of(n.factors.begin(), n.factors.end(), [](const auto& f) { return real_valued(*f); });
            } else if constexpr (std::is_same_v<T, Grid>) {
                return n.outside.imag() == 0.0 &&
                       std::all_of(n.values.begin(), n.values.end(), [](cplx v) { return v.imag() == 0.0; });
            } else {
                return true;
            }
        },
        node.body);
}

/// Appends the points along `coord` where the expression is not smooth.
inline void breakpoints(const Node& node, int coord, std::vector<double>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Power>) {
                if (n.coord == coord && n.exponent > 0.0) out.push_back(std::pow(n.cap, 1.0 / n.exponent));
                if (n.coord == coord && n.exponent > 0.0 && n.exponent < 1.0) out.push_back(0.0);
            } else if constexpr (std::is_same_v<T, Indicator>) {
                for (std::size_t i = 0; i < n.coords.size(); ++i)
                    if (n.coords[i] == coord) {
                        out.push_back(n.lower[i]);
                        out.push_back(n.upper[i]);
                    }
            } else if constexpr (std::is_same_v<T, Sum>) {
                for (const auto& [w, t] : n.terms) breakpoints(*t, coord, out);
            } else if constexpr (std::is_same_v<T, Product>) {
                for (const auto& f : n.factors) breakpoints(*f, coord, out);
            } else if constexpr (std::is_same_v<T, Grid>) {
                if (coord < static_cast<int>(n.dims()))
                    out.insert(out.end(), n.edges[coord].begin(), n.edges[coord].end());
            }
        },
        node.body);
}

inline json to_json(const Node& node) {
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Const>) {
                return {{"kind", "const"}, {"value", detail::complex_to_json(n.value)}};
            } else if constexpr (std::is_same_v<T, Power>) {
                return {{"kind", "power"}, {"coord", n.coord}, {"exponent", n.exponent}, {"cap", n.cap}};
            } else if constexpr (std::is_same_v<T, Indicator>) {
                json upper = json::array();
                for (double u : n.upper) upper.push_back(std::isinf(u) ? json(nullptr) : json(u));
                return {{"kind", "indicator"}, {"coords", n.coords}, {"lower", n.lower}, {"upper", upper}};
            } else if constexpr (std::is_same_v<T, Sin>) {
                return {{"kind", "sin"}, {"coord", n.coord}, {"freq", n.freq}};
            } else if constexpr (std::is_same_v<T, Cos>) {
                return {{"kind", "cos"}, {"coord", n.coord}, {"freq", n.freq}};
            } else if constexpr (std::is_same_v<T, Gauss>) {
                return {{"kind", "gauss"}, {"coord", n.coord}, {"scale", n.scale}};
            } else if constexpr (std::is_same_v<T, Sum>) {
                json terms = json::array();
                for (const auto& [w, t] : n.terms)
                    terms.push_back({{"weight", detail::complex_to_json(w)}, {"expr", to_json(*t)}});
                return {{"kind", "sum"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, Product>) {
                json factors = json::array();
                for (const auto& f : n.factors) factors.push_back(to_json(*f));
                return {{"kind", "product"}, {"factors", factors}};
            } else {
                json values = json::array();
                for (cplx v : n.values) values.push_back(detail::complex_to_json(v));
                return {{"kind", "grid"},
                        {"edges", n.edges},
                        {"values", values},
                        {"outside", detail::complex_to_json(n.outside)}};
            }
        },
        node.body);
}

inline NodePtr from_json(const json& j) {
    if (!j.is_object()) throw ParseError("expression node must be an object");
    const json& kind_field = detail::require(j, "kind");
    if (!kind_field.is_string()) throw ParseError("field 'kind' must be a string");
    const std::string kind = kind_field.get<std::string>();
    try {
        if (kind == "const") return constant(detail::complex_from_json(detail::require(j, "value"), "value"));
        if (kind == "power")
            return power(detail::require_coord(j), detail::require_number(j, "exponent"),
                         detail::require_number(j, "cap"));
        if (kind == "sin") return sin_of(detail::require_coord(j), detail::optional_number(j, "freq", 1.0));
        if (kind == "cos") return cos_of(detail::require_coord(j), detail::optional_number(j, "freq", 1.0));
        if (kind == "gauss") return gauss(detail::require_coord(j), detail::optional_number(j, "scale", 1.0));
        if (kind == "indicator") {
            const json& lo = detail::require(j, "lower");
            const json& hi = detail::require(j, "upper");
            if (!lo.is_array() || !hi.is_array()) throw ParseError("indicator bounds must be arrays");
            std::vector<double> lower, upper;
            for (const auto& v : lo) {
                if (!v.is_number()) throw ParseError("indicator lower bounds must be numbers");
                lower.push_back(v.get<double>());
            }
            for (const auto& v : hi) {
                if (v.is_null()) upper.push_back(std::numeric_limits<double>::infinity());
                else if (v.is_number()) upper.push_back(v.get<double>());
                else throw ParseError("indicator upper bounds must be numbers or null");
            }
            std::vector<int> coords;
            if (auto it = j.find("coords"); it != j.end()) coords = it->get<std::vector<int>>();
            return indicator(std::move(lower), std::move(upper), std::move(coords));
        }
        if (kind == "sum") {
            const json& terms = detail::require(j, "terms");
            if (!terms.is_array()) throw ParseError("sum terms must be an array");
            std::vector<std::pair<cplx, NodePtr>> out;
            for (const auto& t : terms)
                out.emplace_back(detail::complex_from_json(detail::require(t, "weight"), "weight"),
                                 from_json(detail::require(t, "expr")));
            return sum(std::move(out));
        }
        if (kind == "product") {
            const json& factors = detail::require(j, "factors");
            if (!factors.is_array()) throw ParseError("product factors must be an array");
            std::vector<NodePtr> out;
            for (const auto& f : factors) out.push_back(from_json(f));
            return product(std::move(out));
        }
        if (kind == "grid") {
            auto edges = detail::require(j, "edges").get<std::vector<std::vector<double>>>();
            std::vector<cplx> values;
            for (const auto& v : detail::require(j, "values")) values.push_back(detail::complex_from_json(v, "values"));
            cplx outside = detail::complex_from_json(detail::require(j, "outside"), "outside");
            return grid(std::move(edges), std::move(values), outside);
        }
    } catch (const ParameterError& e) {
        throw ParseError(kind + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(kind + ": " + e.what());
    }
    throw UnsupportedError("unsupported symbol node kind '" + kind + "'");
}

}  // namespace sym

/// A bounded function a on R_+^k, identified with the G-invariant symbol
/// phi(z) = a(|z_(1)|, ..., |z_(k)|).
class QuasiRadialSymbol {
public:
    explicit QuasiRadialSymbol(sym::NodePtr root, std::optional<int> declared_arity = std::nullopt)
        : root_(std::move(root)), declared_arity_(declared_arity) {
        int required = sym::required_arity(*root_);
        if (declared_arity_ && *declared_arity_ < std::max(required, 1))
            throw ArityError("declared arity is smaller than the referenced coordinates");
        arity_ = declared_arity_ ? *declared_arity_ : std::max(required, 1);
        required_ = required;
        sup_ = sym::sup_bound(*root_);
    }

    int arity() const noexcept { return arity_; }
    /// Whether the symbol can be read as a function on R_+^k.
    bool conforms(std::size_t k) const noexcept {
        return declared_arity_ ? static_cast<std::size_t>(*declared_arity_) == k
                               : static_cast<std::size_t>(required_) <= k && k >= 1;
    }
    double declared_sup() const noexcept { return sup_; }
    const sym::Node& root() const noexcept { return *root_; }
    const sym::NodePtr& root_ptr() const noexcept { return root_; }

    bool is_continuous() const { return sym::continuous(*root_); }
    bool is_nonnegative() const { return sym::nonnegative(*root_); }
    bool is_real() const { return sym::real_valued(*root_); }

    cplx operator()(std::span<const double> s) const {
        if (!conforms(s.size()))
            throw ArityError("symbol of arity " + std::to_string(arity_) + " evaluated at a point of dimension " +
                             std::to_string(s.size()));
        for (double x : s)
            if (!(x >= 0.0)) throw ParameterError("symbol coordinates must be nonnegative");
        return sym::eval(*root_, s);
    }
    cplx eval_unchecked(std::span<const double> s) const { return sym::eval(*root_, s); }

    json to_json() const {
        json j = sym::to_json(*root_);
        if (declared_arity_) j["arity"] = *declared_arity_;
        return j;
    }

    static QuasiRadialSymbol from_json(const json& j) {
        std::optional<int> arity;
        if (j.is_object())
            if (auto it = j.find("arity"); it != j.end()) {
                if (!it->is_number_integer() || it->get<int>() < 1)
                    throw ParseError("field 'arity' must be a positive integer");
                arity = it->get<int>();
            }
        return QuasiRadialSymbol(sym::from_json(j), arity);
    }

private:
    sym::NodePtr root_;
    std::optional<int> declared_arity_;
    int arity_ = 1;
    int required_ = 0;
    double sup_ = 0.0;
};

inline QuasiRadialSymbol parse_symbol(std::string_view text) {
    return QuasiRadialSymbol::from_json(detail::parse_document(text));
}

inline std::string serialize_symbol(const QuasiRadialSymbol& a) { return a.to_json().dump(); }

inline cplx eval_symbol(const QuasiRadialSymbol& a, std::span<const double> s) { return a(s); }

// ---------------------------------------------------------------------------
// Lattice functions
// ---------------------------------------------------------------------------

namespace lat {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// sigma(m) = expr(sqrt(m_1), ..., sqrt(m_k))
struct Closed { sym::NodePtr expr; int arity; };
/// Values on the box [0, dims_1) x ... (row-major), `tail` elsewhere.
struct Table { std::vector<std::int64_t> dims; std::vector<cplx> values; cplx tail; };
/// value on a finite set of points, zero elsewhere.
struct FiniteSet { std::vector<MultiIndex> points; cplx value; int arity; };
/// sigma(m) = prod_j factor_j(m_j), factors of arity 1.
struct Product { std::vector<NodePtr> factors; };
/// Left: sigma(m + s). Right: sigma(m - s) when m >= s, else 0.
struct Shift { bool left; MultiIndex offset; NodePtr inner; };

struct Node {
    std::variant<Closed, Table, FiniteSet, Product, Shift> body;
};

template <class T>
NodePtr make(T body) {
    return std::make_shared<const Node>(Node{std::move(body)});
}

inline std::size_t arity(const Node& node) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Closed> || std::is_same_v<T, FiniteSet>) {
                return static_cast<std::size_t>(n.arity);
            } else if constexpr (std::is_same_v<T, Table>) {
                return n.dims.size();
            } else if constexpr (std::is_same_v<T, Product>) {
                return n.factors.size();
            } else {
                return n.offset.size();
            }
        },
        node.body);
}

inline cplx eval(const Node& node, std::span<const std::int64_t> m) {
    return std::visit(
        [&](const auto& n) -> cplx {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Closed>) {
                double s[16];
                std::vector<double> big;
                double* p = s;
                if (m.size() > 16) {
                    big.resize(m.size());
                    p = big.data();
                }
                for (std::size_t i = 0; i < m.size(); ++i) p[i] = std::sqrt(static_cast<double>(m[i]));
                return sym::eval(*n.expr, std::span<const double>(p, m.size()));
            } else if constexpr (std::is_same_v<T, Table>) {
                std::size_t flat = 0;
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (m[i] >= n.dims[i]) return n.tail;
                    flat = flat * static_cast<std::size_t>(n.dims[i]) + static_cast<std::size_t>(m[i]);
                }
                return n.values[flat];
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                for (const auto& p : n.points)
                    if (std::equal(p.begin(), p.end(), m.begin(), m.end())) return n.value;
                return 0.0;
            } else if constexpr (std::is_same_v<T, Product>) {
                cplx acc = 1.0;
                for (std::size_t j = 0; j < n.factors.size(); ++j) acc *= eval(*n.factors[j], m.subspan(j, 1));
                return acc;
            } else {
                std::int64_t buf[16];
                std::vector<std::int64_t> big;
                std::int64_t* p = buf;
                if (m.size() > 16) {
                    big.resize(m.size());
                    p = big.data();
                }
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (n.left) {
                        p[i] = m[i] + n.offset[i];
                    } else {
                        if (m[i] < n.offset[i]) return 0.0;
                        p[i] = m[i] - n.offset[i];
                    }
                }
                return eval(*n.inner, std::span<const std::int64_t>(p, m.size()));
            }
        },
        node.body);
}

inline double sup_bound(const Node& node) {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Closed>) {
                return sym::sup_bound(*n.expr);
            } else if constexpr (std::is_same_v<T, Table>) {
                double acc = std::abs(n.tail);
                for (cplx v : n.values) acc = std::max(acc, std::abs(v));
                return acc;
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                return n.points.empty() ? 0.0 : std::abs(n.value);
            } else if constexpr (std::is_same_v<T, Product>) {
                double acc = 1.0;
                for (const auto& f : n.factors) acc *= sup_bound(*f);
                return acc;
            } else {
                return sup_bound(*n.inner);
            }
        },
        node.body);
}

inline json to_json(const Node& node) {
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Closed>) {
                return {{"kind", "closed"}, {"arity", n.arity}, {"expr", sym::to_json(*n.expr)}};
            } else if constexpr (std::is_same_v<T, Table>) {
                json values = json::array();
                for (cplx v : n.values) values.push_back(detail::complex_to_json(v));
                return {{"kind", "table"}, {"dims", n.dims}, {"values", values}, {"tail", detail::complex_to_json(n.tail)}};
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                return {{"kind", "indicator"},
                        {"arity", n.arity},
                        {"points", n.points},
                        {"value", detail::complex_to_json(n.value)}};
            } else if constexpr (std::is_same_v<T, Product>) {
                json factors = json::array();
                for (const auto& f : n.factors) factors.push_back(to_json(*f));
                return {{"kind", "product"}, {"factors", factors}};
            } else {
                return {{"kind", n.left ? "shift_left" : "shift_right"},
                        {"offset", n.offset},
                        {"inner", to_json(*n.inner)}};
            }
        },
        node.body);
}

NodePtr from_json(const json& j);

}  // namespace lat

/// A bounded sigma: N_0^k -> C, total on N_0^k.
class LatticeFunction {
public:
    explicit LatticeFunction(lat::NodePtr root) : root_(std::move(root)) {
        arity_ = lat::arity(*root_);
        if (arity_ < 1) throw ArityError("lattice function needs arity >= 1");
        sup_ = lat::sup_bound(*root_);
    }

    static LatticeFunction closed(sym::NodePtr expr, int arity = 0) {
        int required = std::max(sym::required_arity(*expr), 1);
        if (arity == 0) arity = required;
        if (arity < required) throw ArityError("closed-form arity smaller than referenced coordinates");
        return LatticeFunction(lat::make(lat::Closed{std::move(expr), arity}));
    }
    static LatticeFunction table(std::vector<std::int64_t> dims, std::vector<cplx> values, cplx tail) {
        std::size_t count = 1;
        for (auto d : dims) {
            if (d < 1) throw ParameterError("table dimensions must be positive");
            count *= static_cast<std::size_t>(d);
        }
        if (dims.empty() || values.size() != count) throw ParameterError("table value count does not match dims");
        return LatticeFunction(lat::make(lat::Table{std::move(dims), std::move(values), tail}));
    }
    static LatticeFunction indicator(std::vector<MultiIndex> points, cplx value = 1.0, int arity = 0) {
        if (arity == 0) {
            if (points.empty()) throw ParameterError("empty indicator needs an explicit arity");
            arity = static_cast<int>(points.front().size());
        }
        for (const auto& p : points)
            if (p.size() != static_cast<std::size_t>(arity)) throw ArityError("indicator point arity mismatch");
        return LatticeFunction(lat::make(lat::FiniteSet{std::move(points), value, arity}));
    }
    static LatticeFunction product(const std::vector<LatticeFunction>& factors) {
        std::vector<lat::NodePtr> nodes;
        for (const auto& f : factors) {
            if (f.arity() != 1) throw ArityError("product factors must have arity 1");
            nodes.push_back(f.root_);
        }
        if (nodes.empty()) throw ParameterError("product needs at least one factor");
        return LatticeFunction(lat::make(lat::Product{std::move(nodes)}));
    }

    std::size_t arity() const noexcept { return arity_; }
    double declared_sup() const noexcept { return sup_; }
    const lat::Node& root() const noexcept { return *root_; }
    const lat::NodePtr& root_ptr() const noexcept { return root_; }

    cplx operator()(std::span<const std::int64_t> m) const {
        if (m.size() != arity_)
            throw ArityError("lattice function of arity " + std::to_string(arity_) + " evaluated at a " +
                             std::to_string(m.size()) + "-index");
        for (auto v : m)
            if (v < 0) throw ParameterError("lattice indices must be nonnegative");
        return lat::eval(*root_, m);
    }
    cplx operator()(std::initializer_list<std::int64_t> m) const {
        return (*this)(std::span<const std::int64_t>(m.begin(), m.size()));
    }
    cplx eval_unchecked(std::span<const std::int64_t> m) const { return lat::eval(*root_, m); }

    json to_json() const { return lat::to_json(*root_); }
    static LatticeFunction from_json(const json& j) { return LatticeFunction(lat::from_json(j)); }

private:
    lat::NodePtr root_;
    std::size_t arity_ = 0;
    double sup_ = 0.0;
};

namespace lat {

inline NodePtr from_json(const json& j) {
    if (!j.is_object()) throw ParseError("lattice node must be an object");
    const json& kind_field = detail::require(j, "kind");
    if (!kind_field.is_string()) throw ParseError("field 'kind' must be a string");
    const std::string kind = kind_field.get<std::string>();
    try {
        auto opt_arity = [&]() -> int {
            auto it = j.find("arity");
            return it == j.end() ? 0 : it->get<int>();
        };
        if (kind == "closed")
            return LatticeFunction::closed(sym::from_json(detail::require(j, "expr")), opt_arity()).root_ptr();
        if (kind == "table") {
            auto dims = detail::require(j, "dims").get<std::vector<std::int64_t>>();
            std::vector<cplx> values;
            for (const auto& v : detail::require(j, "values")) values.push_back(detail::complex_from_json(v, "values"));
            return LatticeFunction::table(std::move(dims), std::move(values),
                                          detail::complex_from_json(detail::require(j, "tail"), "tail"))
                .root_ptr();
        }
        if (kind == "indicator") {
            auto points = detail::require(j, "points").get<std::vector<MultiIndex>>();
            cplx value = 1.0;
            if (auto it = j.find("value"); it != j.end()) value = detail::complex_from_json(*it, "value");
            return LatticeFunction::indicator(std::move(points), value, opt_arity()).root_ptr();
        }
        if (kind == "product") {
            std::vector<LatticeFunction> factors;
            for (const auto& f : detail::require(j, "factors")) factors.push_back(LatticeFunction::from_json(f));
            return LatticeFunction::product(factors).root_ptr();
        }
        if (kind == "shift_left" || kind == "shift_right") {
            auto offset = detail::require(j, "offset").get<MultiIndex>();
            auto inner = from_json(detail::require(j, "inner"));
            if (offset.size() != arity(*inner)) throw ArityError("shift offset arity mismatch");
            for (auto s : offset)
                if (s < 0) throw ParseError("shift offsets must be nonnegative");
            return make(Shift{kind == "shift_left", std::move(offset), std::move(inner)});
        }
    } catch (const ParameterError& e) {
        throw ParseError(kind + ": " + e.what());
    } catch (const ArityError& e) {
        throw ParseError(kind + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(kind + ": " + e.what());
    }
    throw UnsupportedError("unsupported lattice node kind '" + kind + "'");
}

}  // namespace lat

inline LatticeFunction parse_lattice(std::string_view text) {
    return LatticeFunction::from_json(detail::parse_document(text));
}

inline cplx eval_lattice(const LatticeFunction& sigma, std::span<const std::int64_t> m) { return sigma(m); }

}  // namespace qrt
