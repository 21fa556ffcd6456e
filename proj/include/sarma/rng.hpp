#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "sarma/multi_index.hpp"
#include "sarma/noise.hpp"

namespace sarma::rng {

// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3" (SC 2011).
// Counter-based generation makes the value at a lattice site a pure function
// of (seed, site), so overlapping windows and parallel tiles agree pointwise.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t kM0 = 0xD2511F53ull, kM1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = kM0 * ctr[0];
    const std::uint64_t p1 = kM1 * ctr[2];
    const std::array<std::uint32_t, 4> next = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    ctr = next;
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) detail::philox_round(ctr, key);
    return ctr;
}

/// Folds lattice coordinates into a 64-bit site label.
inline std::uint64_t site_fold(const MultiIndex& t) {
    std::uint64_t h = 0x12345678ABCDEF01ull ^ static_cast<std::uint64_t>(t.dim());
    for (int i = 0; i < t.dim(); ++i)
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(t[i])));
    return h;
}

/// 128 random bits for draw index `block` at a site.
inline std::array<std::uint64_t, 2> site_block(std::uint64_t seed, std::uint64_t fold, std::uint32_t block) {
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(fold >> 32),
                                              block, 0x5eedu};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto out = philox4x32(ctr, key);
    return {(static_cast<std::uint64_t>(out[0]) << 32) | out[1], (static_cast<std::uint64_t>(out[2]) << 32) | out[3]};
}

inline double u01(std::uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }         // [0, 1)
inline double u01_open(std::uint64_t w) { return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53; }  // (0, 1]

/// The innovation Z_t: a pure function of (noise, seed, t).
inline std::complex<double> sample_site(const NoiseSpec& noise, std::uint64_t seed, const MultiIndex& t) {
    if (noise.family() == NoiseFamily::Deterministic) return {noise.constant(), 0.0};
    const auto w = site_block(seed, site_fold(t), 0);
    switch (noise.family()) {
        case NoiseFamily::Gaussian: {
            const double r = noise.sigma() * std::sqrt(-2.0 * std::log(u01_open(w[0])));
            const double ang = 2.0 * std::numbers::pi * u01(w[1]);
            return {r * std::cos(ang), r * std::sin(ang)};
        }
        case NoiseFamily::ParetoTail: {
            const double mag = std::pow(u01_open(w[0]), -1.0 / noise.pareto_exponent());
            const double sign = noise.symmetric() ? ((w[1] & 1u) ? 1.0 : -1.0) : 1.0;
            return {sign * mag, 0.0};
        }
        case NoiseFamily::LogPareto: {
            const double mag = std::exp(std::pow(u01_open(w[0]), -1.0 / noise.log_pareto_exponent()));
            const double sign = noise.symmetric() ? ((w[1] & 1u) ? 1.0 : -1.0) : 1.0;
            return {sign * mag, 0.0};
        }
        case NoiseFamily::Cauchy:
            return {std::tan(std::numbers::pi * (u01(w[0]) - 0.5)), 0.0};
        case NoiseFamily::TwoPoint:
            return {(w[0] & 1u) ? 1.0 : -1.0, 0.0};
        default:
            return {0.0, 0.0};
    }
}

/// Uniform [0, 1) stream decoupled from any lattice site (path generation etc.).
inline double stream_u01(std::uint64_t seed, std::uint64_t index) {
    return u01(splitmix64(seed ^ splitmix64(index)));
}

}  // namespace sarma::rng
