#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sarma/spectral.hpp"

namespace sarma {

/// Step weights of the first-order 2D model: phi1, phi2, phi3 weight the
/// lattice moves (1,0), (0,1), (1,1).
struct DelannoyParams {
    double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;
};

/// Dynamic-programming fill of the weighted Delannoy recursion
/// psi_{n,k} = phi1 psi_{n-1,k} + phi2 psi_{n,k-1} + phi3 psi_{n-1,k-1}
/// with psi = 0 off the nonnegative quadrant and psi_{0,0} = 1.
inline std::vector<std::vector<double>> delannoy_table(const DelannoyParams& p, int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("delannoy: indices must be nonnegative");
    std::vector<std::vector<double>> t(static_cast<std::size_t>(n) + 1, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0));
    t[0][0] = 1.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= k; ++j) {
            if (i == 0 && j == 0) continue;
            double v = 0.0;
            if (i > 0) v += p.phi1 * t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            if (j > 0) v += p.phi2 * t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)];
            if (i > 0 && j > 0) v += p.phi3 * t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    return t;
}

inline double delannoy_recursive(const DelannoyParams& p, int n, int k) {
    return delannoy_table(p, n, k)[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

namespace detail {

/// Binomial coefficients by multiplicative running products; exact up to the
/// double mantissa for the n, k <= 60 window used here.
inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
}

inline std::vector<double> pow_table(double x, int n) {
    std::vector<double> t(static_cast<std::size_t>(n) + 1, 1.0);
    for (int i = 1; i <= n; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * x;
    return t;
}

}  // namespace detail

/// Closed form sum_j C(k,j) C(n+k-j,k) phi1^{n-j} phi2^{k-j} phi3^j.
/// C(k,j) C(n+k-j,k) = (n+k-j)! / (j! (k-j)! (n-j)!) is updated through its
/// manifestly (n,phi1) <-> (k,phi2) symmetric trinomial form, and the power
/// factors are grouped commutatively, so the transpose identity holds bit for
/// bit, not just to rounding.
inline double delannoy_closed_a(const DelannoyParams& p, int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("delannoy: indices must be nonnegative");
    const auto p1 = detail::pow_table(p.phi1, n);
    const auto p2 = detail::pow_table(p.phi2, k);
    const auto p3 = detail::pow_table(p.phi3, std::min(n, k));
    double tri = detail::binom(n + k, k);  // (n+k-j)! / (j! (k-j)! (n-j)!) at j = 0
    double sum = 0.0;
    const int jmax = std::min(n, k);
    for (int j = 0; j <= jmax; ++j) {
        sum += tri * (p1[static_cast<std::size_t>(n - j)] * p2[static_cast<std::size_t>(k - j)]) * p3[static_cast<std::size_t>(j)];
        if (j < jmax)
            tri = tri * static_cast<double>((k - j) * (n - j)) / static_cast<double>((j + 1) * (n + k - j));
    }
    return sum;
}

/// Closed form sum_j C(n,j) C(k,j) phi1^{n-j} phi2^{k-j} (phi1 phi2 + phi3)^j,
/// grouped the same way for exact transpose symmetry.
inline double delannoy_closed_b(const DelannoyParams& p, int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("delannoy: indices must be nonnegative");
    const auto p1 = detail::pow_table(p.phi1, n);
    const auto p2 = detail::pow_table(p.phi2, k);
    const auto pm = detail::pow_table(p.phi1 * p.phi2 + p.phi3, std::min(n, k));
    double c_nj = 1.0, c_kj = 1.0;
    double sum = 0.0;
    const int jmax = std::min(n, k);
    for (int j = 0; j <= jmax; ++j) {
        sum += (c_nj * c_kj) * (p1[static_cast<std::size_t>(n - j)] * p2[static_cast<std::size_t>(k - j)]) * pm[static_cast<std::size_t>(j)];
        if (j < jmax) {
            c_nj = c_nj * static_cast<double>(n - j) / static_cast<double>(j + 1);
            c_kj = c_kj * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Jacobi polynomials
// ---------------------------------------------------------------------------

struct JacobiEvalRequest {
    int n = 0;
    double alpha = 0.0, beta = 0.0;
    double x = 0.0;
};

/// P_n^{(alpha,beta)}(x) by the standard three-term recurrence; matches the
/// Rodrigues definition (tested against its Leibniz expansion for small n) and
/// stays stable out to the k <= 40 range the identity check needs.
inline double jacobi_poly(const JacobiEvalRequest& req) {
    if (req.n < 0) throw std::invalid_argument("jacobi_poly: degree must be nonnegative");
    if (!(req.alpha > -1.0) || !(req.beta > -1.0)) throw std::domain_error("jacobi_poly: alpha, beta must exceed -1");
    const double a = req.alpha, b = req.beta, x = req.x;
    if (req.n == 0) return 1.0;
    double pm1 = 1.0;
    double p = 0.5 * (a - b) + (1.0 + 0.5 * (a + b)) * x;
    for (int n = 2; n <= req.n; ++n) {
        const double c1 = 2.0 * n * (n + a + b) * (2.0 * n + a + b - 2.0);
        const double c2 = (2.0 * n + a + b - 1.0) * (a * a - b * b);
        const double c3 = (2.0 * n + a + b - 2.0) * (2.0 * n + a + b - 1.0) * (2.0 * n + a + b);
        const double c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + a + b);
        const double next = ((c2 + c3 * x) * p - c4 * pm1) / c1;
        pm1 = p;
        p = next;
    }
    return p;
}

struct JacobiIdentityResult {
    double lhs = 0.0;  // weighted Delannoy value psi_{k+beta,k}
    double rhs = 0.0;  // phi1^beta (-phi3)^k P_k^{(0,beta)}(-2 phi1 phi2 / phi3 - 1)
    double abs_diff = 0.0;
};

/// Diagonal Delannoy values against the Jacobi form, both sides computed
/// independently. The left side goes through the recursion table rather than
/// a closed form: in the oscillatory regime (phi3/(phi1 phi2) < -1) the
/// closed-form sums cancel catastrophically around k = 40 while the table
/// stays at O(eps) error.
inline JacobiIdentityResult jacobi_delannoy_identity(const DelannoyParams& p, int beta, int k) {
    if (p.phi3 == 0.0) throw std::invalid_argument("jacobi_delannoy_identity: phi3 must be nonzero");
    if (beta < 0 || k < 0) throw std::invalid_argument("jacobi_delannoy_identity: beta, k must be nonnegative");
    JacobiIdentityResult r;
    r.lhs = delannoy_recursive(p, k + beta, k);
    const double arg = -2.0 * p.phi1 * p.phi2 / p.phi3 - 1.0;
    double scale = std::pow(p.phi1, beta) * std::pow(-p.phi3, k);
    r.rhs = scale * jacobi_poly({k, 0.0, static_cast<double>(beta), arg});
    r.abs_diff = std::abs(r.lhs - r.rhs);
    return r;
}

// ---------------------------------------------------------------------------
// Bessel J0/J1
// ---------------------------------------------------------------------------

namespace detail {

/// Hankel asymptotic coefficient A_m(nu) = prod_{j<=m} (4 nu^2 - (2j-1)^2) / (m! 8^m).
inline double hankel_coeff(double mu, int m) {
    double r = 1.0;
    for (int j = 1; j <= m; ++j) r *= (mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j);
    return r;
}

inline double bessel_series(int nu, double x) {
    const double half = 0.5 * x;
    double term = nu == 0 ? 1.0 : half;
    double sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= -half * half / (static_cast<double>(m) * (m + nu));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

inline double bessel_asymptotic(int nu, double x) {
    const double mu = 4.0 * static_cast<double>(nu) * static_cast<double>(nu);
    double psum = 0.0, qsum = 0.0;
    for (int k = 0; k <= 3; ++k) {
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        psum += sgn * hankel_coeff(mu, 2 * k) / std::pow(x, 2 * k);
        qsum += sgn * hankel_coeff(mu, 2 * k + 1) / std::pow(x, 2 * k + 1);
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (psum * std::cos(chi) - qsum * std::sin(chi));
}

}  // namespace detail

/// (J0(x), J1(x)): Maclaurin series below x = 12, Hankel expansion with three
/// correction terms beyond. Absolute error stays under 1e-8 on both branches.
inline std::pair<double, double> bessel_j01(double x) {
    if (x < 0.0) throw std::domain_error("bessel_j01: negative argument");
    if (x < 12.0) return {detail::bessel_series(0, x), detail::bessel_series(1, x)};
    return {detail::bessel_asymptotic(0, x), detail::bessel_asymptotic(1, x)};
}

// ---------------------------------------------------------------------------
// Oscillatory decay diagnostic
// ---------------------------------------------------------------------------

struct DecayDiagnosticRow {
    int n = 0;
    double big_n = 0.0;  // N = n + (beta+1)/2
    double jacobi_side = 0.0;
    double bessel_side = 0.0;
    double residual = 0.0;
    double residual_times_n = 0.0;
};

struct DecayDiagnostic {
    std::vector<DecayDiagnosticRow> rows;
    double loglog_slope = 0.0;  // least-squares slope of log residual vs log N
};

/// Residuals of (cos(theta/2))^beta P_n^{(0,beta)}(cos theta) against
/// sqrt(theta/sin theta) J0(N theta), N = n + (beta+1)/2. The error constant is
/// not estimated; the table exhibits residual*N boundedness and the log-log
/// slope instead.
inline DecayDiagnostic asymptotic_decay_diagnostic(double theta, int beta, int n_lo, int n_hi) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi))
        throw std::domain_error("asymptotic_decay_diagnostic: theta must lie strictly inside (0, pi)");
    if (beta < 0 || n_lo < 0 || n_hi < n_lo) throw std::invalid_argument("asymptotic_decay_diagnostic: bad degree range");
    DecayDiagnostic out;
    const double x = std::cos(theta);
    const double envelope = std::pow(std::cos(0.5 * theta), beta);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int fitted = 0;
    for (int n = n_lo; n <= n_hi; ++n) {
        DecayDiagnosticRow row;
        row.n = n;
        row.big_n = n + 0.5 * (beta + 1.0);
        row.jacobi_side = envelope * jacobi_poly({n, 0.0, static_cast<double>(beta), x});
        row.bessel_side = std::sqrt(theta / std::sin(theta)) * bessel_j01(row.big_n * theta).first;
        row.residual = std::abs(row.jacobi_side - row.bessel_side);
        row.residual_times_n = row.residual * row.big_n;
        if (row.residual > 0.0 && n > 0) {
            const double lx = std::log(row.big_n), ly = std::log(row.residual);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++fitted;
        }
        out.rows.push_back(row);
    }
    if (fitted >= 2) {
        const double nf = static_cast<double>(fitted);
        out.loglog_slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Counting function and L1 sphere counts
// ---------------------------------------------------------------------------

/// f(x) = #{(n,k) in the box : |psi_{n,k}|^{-1} <= x}, entries with psi = 0
/// excluded. The box must provably contain every counted point: the empirical
/// envelope r^max(n,k) fitted on the box has to push |psi| below 1/x outside.
inline std::int64_t counting_function(const DelannoyParams& p, double x, int box) {
    if (!(x > 1.0)) throw std::invalid_argument("counting_function: x must exceed 1");
    if (box < 1) throw std::invalid_argument("counting_function: box must be positive");
    const auto t = delannoy_table(p, box, box);
    double root = 0.0;
    for (int n = 0; n <= box; ++n)
        for (int k = 0; k <= box; ++k) {
            if (n == 0 && k == 0) continue;
            const double a = std::abs(t[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]);
            if (a > 0.0) root = std::max(root, std::pow(a, 1.0 / std::max(n, k)));
        }
    if (root >= 1.0 || 1.05 * std::pow(root, box + 1) > 1.0 / x)
        throw std::invalid_argument("counting_function: box insufficient per decay bound");
    std::int64_t count = 0;
    const double floor_value = 1.0 / x;
    for (int n = 0; n <= box; ++n)
        for (int k = 0; k <= box; ++k) {
            const double a = std::abs(t[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]);
            if (a > 0.0 && a >= floor_value) ++count;
        }
    return count;
}

/// h_d(n) = #{k in Z^d : |k_1| + ... + |k_d| = n}, by the recursion over the
/// last coordinate: h_{d+1}(n) = sum_k h_d(n-k) * (k == 0 ? 1 : 2).
inline std::int64_t l1_sphere_count(int d, int n) {
    if (d < 1 || n < 0) throw std::invalid_argument("l1_sphere_count: need d >= 1, n >= 0");
    std::vector<std::int64_t> h(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) h[static_cast<std::size_t>(m)] = (m == 0) ? 1 : 2;
    for (int dim = 2; dim <= d; ++dim) {
        std::vector<std::int64_t> next(static_cast<std::size_t>(n) + 1, 0);
        for (int m = 0; m <= n; ++m) {
            std::int64_t s = 0;
            for (int k = 0; k <= m; ++k) {
                const std::int64_t add = h[static_cast<std::size_t>(m - k)] * (k == 0 ? 1 : 2);
                if (__builtin_add_overflow(s, add, &s)) throw std::overflow_error("l1_sphere_count: overflow");
            }
            next[static_cast<std::size_t>(m)] = s;
        }
        h = std::move(next);
    }
    return h[static_cast<std::size_t>(n)];
}

/// The Delannoy coefficient field on [0, box]^2 as a causal CoefficientField.
inline CoefficientField delannoy_field(const DelannoyParams& p, int box) {
    const auto t = delannoy_table(p, box, box);
    std::vector<cdouble> values;
    values.reserve(static_cast<std::size_t>((box + 1) * (box + 1)));
    for (int n = 0; n <= box; ++n)
        for (int k = 0; k <= box; ++k) values.emplace_back(t[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)], 0.0);
    return CoefficientField::causal_box(MultiIndex{box, box}, std::move(values));
}

}  // namespace sarma
