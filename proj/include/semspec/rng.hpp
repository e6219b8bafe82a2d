#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace semspec {

// std::mt19937_64 output is pinned by the standard, but the distribution
// adapters are not, so the float draws below are built directly on the raw
// 64-bit stream. Same seed, same stream, on every platform.

/// Uniform double in [0, 1), 53 random mantissa bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; fine here since n << 2^64.
    return rng() % n;
}

/// Standard normal via Box-Muller on the raw stream.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Seeded stream handle; every draw consumes the shared stream in call order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return semspec::uniform01(engine_); }
    double uniform_in(double lo, double hi) { return semspec::uniform_in(engine_, lo, hi); }
    std::uint64_t uniform_index(std::uint64_t n) { return semspec::uniform_index(engine_, n); }
    double standard_normal() { return semspec::standard_normal(engine_); }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

} // namespace semspec
