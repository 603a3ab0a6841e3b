#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace qrt {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based stream: draw d of sample i under seed s is a pure function
/// of (s, i, d).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index) noexcept
        : key_(splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull))) {}

    std::uint64_t next_u64() noexcept { return splitmix64(key_ + 0x632BE59BD9B4E019ull * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Complex normal with E|z|^2 = 1 (real and imaginary variance 1/2).
    std::complex<double> complex_normal() noexcept {
        double r = std::sqrt(-std::log(uniform()));
        double t = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

    /// Real standard normal.
    double normal() noexcept {
        double r = std::sqrt(-2.0 * std::log(uniform()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qrt
