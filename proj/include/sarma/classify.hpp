#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace sarma {

enum class Verdict { Finite, Divergent, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Finite: return "finite";
        case Verdict::Divergent: return "divergent";
        default: return "inconclusive";
    }
}

/// Classifies a sequence of monotone approximations (quadrature estimates or
/// partial sums) by the behaviour of its refinement increments.
///
/// Over the last up-to-three increments:
///   finite     - each increment at most half the previous one (geometric tail),
///   divergent  - increments positive and each at least 0.9x the previous one
///                (the signature of logarithmic or polynomial divergence),
///   inconclusive otherwise, or when fewer than two increments exist.
struct IncrementPattern {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<double> increments;
    std::vector<double> ratios;
    std::string note;
};

inline IncrementPattern classify_increments(const std::vector<double>& values, double finite_ratio = 0.5,
                                            double divergent_ratio = 0.9) {
    IncrementPattern out;
    if (values.size() < 2) {
        out.note = "need at least two values";
        return out;
    }
    for (std::size_t i = 1; i < values.size(); ++i) out.increments.push_back(values[i] - values[i - 1]);
    for (std::size_t i = 1; i < out.increments.size(); ++i) {
        const double prev = std::abs(out.increments[i - 1]);
        out.ratios.push_back(prev > 0.0 ? std::abs(out.increments[i]) / prev
                                        : (std::abs(out.increments[i]) > 0.0 ? HUGE_VAL : 0.0));
    }
    // fully stabilized sequences are finite outright; their increment ratios
    // are rounding noise
    const double scale = std::max(std::abs(values.back()), 1.0);
    bool stabilized = true;
    const std::size_t tail = std::min<std::size_t>(2, out.increments.size());
    for (std::size_t i = out.increments.size() - tail; i < out.increments.size(); ++i)
        if (std::abs(out.increments[i]) > 1e-10 * scale) stabilized = false;
    if (stabilized) {
        out.verdict = Verdict::Finite;
        out.note = "increments at rounding level: stabilized";
        return out;
    }
    if (out.ratios.empty()) {
        out.note = "single increment: no ratio available";
        return out;
    }
    const std::size_t use = std::min<std::size_t>(2, out.ratios.size());
    const std::size_t first = out.ratios.size() - use;
    bool all_finite = true, all_divergent = true;
    for (std::size_t i = first; i < out.ratios.size(); ++i) {
        if (!(out.ratios[i] <= finite_ratio)) all_finite = false;
        if (!(out.ratios[i] >= divergent_ratio && out.increments[i + 1] > 0.0)) all_divergent = false;
    }
    if (all_finite)
        out.verdict = Verdict::Finite;
    else if (all_divergent)
        out.verdict = Verdict::Divergent;
    return out;
}

}  // namespace sarma
