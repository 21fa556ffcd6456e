#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sarma/ndarray.hpp"

namespace sarma::fft {

using cdouble = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

/// In-place radix-2 Cooley-Tukey. Twiddles are computed from exact angles per
/// stage so rounding does not accumulate along long runs.
inline void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cdouble> w;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        w.resize(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            w[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cdouble u = a[i + k];
                const cdouble v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

/// Bluestein's chirp algorithm for arbitrary lengths. The chirp phase uses
/// k^2 mod 2n to keep the angle argument small.
inline void fft_bluestein(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cdouble> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<cdouble> x(m, cdouble{0.0, 0.0}), y(m, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = std::conj(chirp[k]);
        if (k != 0) y[m - k] = std::conj(chirp[k]);
    }
    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv;
    }
}

}  // namespace detail

/// One-dimensional DFT of any length.
/// Forward: X[m] = sum_j x[j] e^{-2 pi i j m / n}; inverse carries the 1/n factor.
inline void transform(std::vector<cdouble>& a, bool inverse) {
    if (a.size() < 2) return;
    if (is_power_of_two(a.size()))
        detail::fft_pow2(a, inverse);
    else
        detail::fft_bluestein(a, inverse);
}

/// Multidimensional DFT applied axis by axis, serial and deterministic.
inline void transform_nd(NdArray& grid, bool inverse) {
    const auto& ext = grid.extents();
    const int d = grid.dim();
    std::int64_t stride_after = 1;
    for (int axis = d - 1; axis >= 0; --axis) {
        const int m = ext[static_cast<std::size_t>(axis)];
        const std::int64_t stride = stride_after;
        stride_after *= m;
        if (m > 1) {
            const std::int64_t lines = grid.size() / m;
            std::vector<cdouble> line(static_cast<std::size_t>(m));
            for (std::int64_t l = 0; l < lines; ++l) {
                const std::int64_t block = l / stride;
                const std::int64_t offset = l % stride;
                const std::int64_t base = block * stride * m + offset;
                for (int j = 0; j < m; ++j) line[static_cast<std::size_t>(j)] = grid[base + j * stride];
                transform(line, inverse);
                for (int j = 0; j < m; ++j) grid[base + j * stride] = line[static_cast<std::size_t>(j)];
            }
        }
    }
}

}  // namespace sarma::fft
