#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sarma {

/// Zero decision for the bilinear family Phi(z1,z2) = 1 - a z1 - b z2 - c z1 z2
/// on the closed bidisc.
struct BilinearBidiscResult {
    bool zero_free = false;
    double min_modulus = 0.0;     // min |Phi| over the closed bidisc (zero-free case)
    std::complex<double> z1, z2;  // a zero when !zero_free
};

namespace detail {

/// For fixed z1 the equation is linear in z2 with unique root
/// g(z1) = (1 - a z1)/(b + c z1); Phi is zero-free on the closed bidisc iff
/// |g| > 1 throughout, i.e. iff H = max_{|z1|=1} |h|, h = 1/g, stays below 1.
struct BilinearCore {
    double a, b, c;

    std::complex<double> h(std::complex<double> z) const { return (b + c * z) / (1.0 - a * z); }

    double abs_h(double theta) const { return std::abs(h(std::polar(1.0, theta))); }

    /// |Phi| minimized over |z2| = 1 at fixed z1 = e^{i theta}.
    double ring_min(double theta) const {
        const std::complex<double> z = std::polar(1.0, theta);
        return std::abs(std::abs(1.0 - a * z) - std::abs(b + c * z));
    }
};

template <class F>
double refine_extremum(F f, double lo, double hi, bool maximize, double& arg) {
    for (int it = 0; it < 120; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const bool keep_left = maximize ? (f(m1) >= f(m2)) : (f(m1) <= f(m2));
        if (keep_left)
            hi = m2;
        else
            lo = m1;
    }
    arg = 0.5 * (lo + hi);
    return f(arg);
}

/// Dense cyclic scan plus ternary refinement of the best local extrema.
template <class F>
double scan_circle(F f, bool maximize, double& arg_out, int samples = 4096) {
    const double step = 2.0 * std::numbers::pi / samples;
    std::vector<double> vals(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) vals[static_cast<std::size_t>(i)] = f(i * step);
    std::vector<int> cand;
    for (int i = 0; i < samples; ++i) {
        const double prev = vals[static_cast<std::size_t>((i + samples - 1) % samples)];
        const double next = vals[static_cast<std::size_t>((i + 1) % samples)];
        const double v = vals[static_cast<std::size_t>(i)];
        const bool local = maximize ? (v >= prev && v >= next) : (v <= prev && v <= next);
        if (local) cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](int x, int y) {
        return maximize ? vals[static_cast<std::size_t>(x)] > vals[static_cast<std::size_t>(y)]
                        : vals[static_cast<std::size_t>(x)] < vals[static_cast<std::size_t>(y)];
    });
    if (cand.size() > 8) cand.resize(8);
    double best = maximize ? -HUGE_VAL : HUGE_VAL;
    double best_arg = 0.0;
    for (int i : cand) {
        double arg = 0.0;
        const double v = refine_extremum(f, (i - 1) * step, (i + 1) * step, maximize, arg);
        if (maximize ? v > best : v < best) {
            best = v;
            best_arg = arg;
        }
    }
    arg_out = best_arg;
    return best;
}

}  // namespace detail

/// Exact-reduction zero search for 1 - a z1 - b z2 - c z1 z2 on the closed
/// bidisc. Decision tolerance applies to the boundary maximum of |1/g|.
/// The computation is canonicalized under the z1 <-> z2 swap, so swapping
/// (a, b) yields the identical verdict and minimum.
///
/// The spatial-AR literature also describes the zero-free parameter region in
/// closed form; this numeric reduction is the single source of truth here and
/// that description serves only as a cross-check.
inline BilinearBidiscResult bidisc_zero_free_bilinear(double phi1, double phi2, double phi3, double tol = 1e-10) {
    if (phi1 == 0.0 && phi2 == 0.0 && phi3 == 0.0)
        throw std::invalid_argument("bidisc_zero_free_bilinear: all coefficients are zero");
    const bool swapped = phi1 > phi2;
    const double a = swapped ? phi2 : phi1;
    const double b = swapped ? phi1 : phi2;
    const double c = phi3;

    BilinearBidiscResult res;
    auto finish = [&](BilinearBidiscResult r) {
        if (swapped) std::swap(r.z1, r.z2);
        return r;
    };

    // Pure one-variable degenerations.
    if (b == 0.0 && c == 0.0) {
        if (std::abs(a) < 1.0) {
            res.zero_free = true;
            res.min_modulus = 1.0 - std::abs(a);
        } else {
            res.z1 = 1.0 / a;
            res.z2 = 0.0;
        }
        return finish(res);
    }
    if (std::abs(a) >= 1.0) {
        res.z1 = 1.0 / a;
        res.z2 = 0.0;  // Phi(1/a, 0) = 0
        return finish(res);
    }
    if (std::abs(b) >= 1.0) {
        res.z1 = 0.0;
        res.z2 = 1.0 / b;
        return finish(res);
    }

    const detail::BilinearCore core{a, b, c};
    double theta_max = 0.0;
    const double H = detail::scan_circle([&](double t) { return core.abs_h(t); }, true, theta_max);
    if (H >= 1.0 - tol) {
        const std::complex<double> z1 = std::polar(1.0, theta_max);
        std::complex<double> z2 = (1.0 - a * z1) / (b + c * z1);
        if (std::abs(z2) > 1.0) z2 /= std::abs(z2);
        res.z1 = z1;
        res.z2 = z2;
        return finish(res);
    }
    double theta_min = 0.0;
    const double m = detail::scan_circle([&](double t) { return core.ring_min(t); }, false, theta_min);
    res.zero_free = true;
    res.min_modulus = m;
    return finish(res);
}

}  // namespace sarma
