#pragma once

// g(i, j) = sin(sqrt j - sqrt i) on sqrt j in [sqrt i, sqrt i + pi), zero
// elsewhere: uniformly continuous on N_0^2 for rho_2, while its rows form a
// non-precompact family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qrt/errors.hpp"
#include "qrt/sqrtmetric.hpp"

namespace qrt {

inline constexpr double obstruction_guard = 1e-12;

/// sqrt j - sqrt i without cancellation.
inline double sqrt_offset(std::int64_t i, std::int64_t j) {
    if (i == j) return 0.0;
    double a = static_cast<double>(i), b = static_cast<double>(j);
    return (b - a) / (std::sqrt(b) + std::sqrt(a));
}

inline double g_value(std::int64_t i, std::int64_t j) {
    if (i < 0 || j < 0) throw ParameterError("g_value needs nonnegative indices");
    double d = sqrt_offset(i, j);
    return (d >= 0.0 && d < std::numbers::pi) ? std::sin(d) : 0.0;
}

/// True when sqrt j sits within the guard band of the right end of I_i.
inline bool in_guard_band(std::int64_t i, std::int64_t j) {
    return std::abs(sqrt_offset(i, j) - std::numbers::pi) < obstruction_guard;
}

/// Last j with sqrt j < sqrt i + pi (plus one for safety).
inline std::int64_t row_end(std::int64_t i) {
    double top = std::sqrt(static_cast<double>(i)) + std::numbers::pi;
    return static_cast<std::int64_t>(std::ceil(top * top)) + 1;
}

/// max_j |g(i, j)| over the support of row i.
inline double row_sup(std::int64_t i) {
    if (i < 0) throw ParameterError("row_sup needs i >= 0");
    double best = 0.0;
    for (std::int64_t j = i, end = row_end(i); j <= end; ++j) best = std::max(best, std::abs(g_value(i, j)));
    return best;
}

/// sup_j |g(i1, j) - g(i2, j)| over the union of both row supports.
inline double row_separation(std::int64_t i1, std::int64_t i2) {
    if (i1 < 0 || i2 < 0) throw ParameterError("row_separation needs nonnegative indices");
    if (i1 == i2) return 0.0;
    double best = 0.0;
    for (std::int64_t row : {i1, i2})
        for (std::int64_t j = row, end = row_end(row); j <= end; ++j)
            best = std::max(best, std::abs(g_value(i1, j) - g_value(i2, j)));
    return best;
}

struct ObstructionConfig {
    std::int64_t max_i = 4000;
    std::int64_t max_j = 4000;
    std::size_t pairs = 100000;
};

/// Greedy radius-net over the rows {g(i, .)}: number of centres needed.
inline std::size_t greedy_net_size(std::span<const std::int64_t> rows, double radius) {
    std::vector<std::int64_t> centres;
    for (auto r : rows) {
        bool covered = std::any_of(centres.begin(), centres.end(),
                                   [&](auto c) { return row_separation(c, r) <= radius; });
        if (!covered) centres.push_back(r);
    }
    return centres.size();
}

}  // namespace qrt
