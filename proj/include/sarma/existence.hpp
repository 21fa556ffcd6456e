#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarma/bilinear.hpp"
#include "sarma/classify.hpp"
#include "sarma/model.hpp"
#include "sarma/noise.hpp"
#include "sarma/spectral.hpp"

namespace sarma {

enum class CheckMode { LinearStationary, Causal, FirstOrder2D };
enum class ExistenceVerdict { Exists, NotExists, Unknown };
enum class ConditionStatus { Pass, Fail, Unknown };

inline const char* to_string(ExistenceVerdict v) {
    switch (v) {
        case ExistenceVerdict::Exists: return "exists";
        case ExistenceVerdict::NotExists: return "not-exists";
        default: return "unknown";
    }
}

inline const char* to_string(CheckMode m) {
    switch (m) {
        case CheckMode::LinearStationary: return "linear-stationary";
        case CheckMode::Causal: return "causal";
        default: return "first-order-2d";
    }
}

inline const char* to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::Pass: return "pass";
        case ConditionStatus::Fail: return "fail";
        default: return "unknown";
    }
}

struct Condition {
    std::string name;
    ConditionStatus status = ConditionStatus::Unknown;
    std::string evidence;
    std::string citation;
};

/// Assembled evidence for one existence question. `Exists` is only set when a
/// full sufficient leg passed; `NotExists` only when a necessary condition
/// failed; everything else stays `Unknown` with the evidence preserved, since
/// the sufficient and necessary conditions do not meet in general.
struct ExistenceReport {
    CheckMode mode = CheckMode::LinearStationary;
    ExistenceVerdict verdict = ExistenceVerdict::Unknown;
    std::vector<Condition> conditions;
    std::string summary;
    std::optional<CoefficientField> solution_coefficients;

    int exit_code() const {
        switch (verdict) {
            case ExistenceVerdict::Exists: return 0;
            case ExistenceVerdict::NotExists: return 1;
            default: return 2;
        }
    }
};

inline nlohmann::json report_to_json(const ExistenceReport& r) {
    nlohmann::json j;
    j["mode"] = to_string(r.mode);
    j["verdict"] = to_string(r.verdict);
    j["summary"] = r.summary;
    j["conditions"] = nlohmann::json::array();
    j["citations"] = nlohmann::json::array();
    for (const auto& c : r.conditions) {
        j["conditions"].push_back({{"name", c.name}, {"status", to_string(c.status)}, {"evidence", c.evidence}});
        if (!c.citation.empty()) j["citations"].push_back(c.citation);
    }
    return j;
}

struct CheckOptions {
    QuadratureOptions quadrature;
    int alpha_box = 0;    // per-axis causal recursion box; 0 = auto by dimension
    int psi_keep = 6;     // kept box half-width when attaching psi evidence
    double zero_tol = 1e-9;
};

namespace detail {

inline int auto_alpha_box(int dim) {
    switch (dim) {
        case 1: return 4096;
        case 2: return 128;
        case 3: return 48;
        case 4: return 24;
        default: return 16;
    }
}

/// Dyadic-shell pattern of the partial H^2 norms: the shared increment rule
/// applied to partial sums at s_max/8, s_max/4, s_max/2, s_max.
inline IncrementPattern h2_pattern(const CoefficientField& alpha, int s_max) {
    const auto partial = h2_partial_norms(alpha, s_max);
    std::vector<double> ladder;
    for (int s : {s_max / 8, s_max / 4, s_max / 2, s_max}) ladder.push_back(partial[static_cast<std::size_t>(s)]);
    return classify_increments(ladder);
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

/// Existence of a linear strictly stationary solution.
/// Necessary leg: the L^2(T^d) spectral condition (divergence refutes any
/// linear solution). Sufficient leg: no torus zero found plus a finite d-th
/// log moment, in which case the Fourier coefficients form the solution.
namespace detail {

inline bool trivial_model(const ModelSpec& m) { return m.ar.empty() && m.ma.empty(); }

inline ExistenceReport trivial_report(CheckMode mode, int dim) {
    ExistenceReport rep;
    rep.mode = mode;
    rep.verdict = ExistenceVerdict::Exists;
    rep.conditions.push_back({"empty index sets", ConditionStatus::Pass, "Y = Z solves the equation outright",
                              "trivial identity solution"});
    rep.summary = "trivial model: Y = Z is a strictly stationary solution";
    CoefficientField delta(dim, SupportKind::CausalOrthant);
    delta.set(MultiIndex::zero(dim), 1.0);
    rep.solution_coefficients = std::move(delta);
    return rep;
}

}  // namespace detail

inline ExistenceReport check_linear_stationary(const ModelSpec& model, const NoiseSpec& noise,
                                               const CheckOptions& opt = {}) {
    model.validate();
    if (detail::trivial_model(model) && noise.nondeterministic())
        return detail::trivial_report(CheckMode::LinearStationary, model.dim);
    ExistenceReport rep;
    rep.mode = CheckMode::LinearStationary;
    auto [phi, theta] = arma_polys(model);

    if (!noise.nondeterministic()) {
        // Constant noise K: a constant field y solves the equation iff
        // y Phi(1,...,1) = K Theta(1,...,1).
        const std::vector<cdouble> ones(static_cast<std::size_t>(model.dim), cdouble{1.0, 0.0});
        const cdouble phi1 = phi.eval(ones);
        const cdouble theta1 = theta.eval(ones);
        const double k = noise.constant();
        Condition c{"constant-noise reduction", ConditionStatus::Unknown, "", "deterministic noise: algebraic constant-field check"};
        if (std::abs(phi1) > 0.0) {
            c.status = ConditionStatus::Pass;
            c.evidence = "constant field Y = K Theta(1)/Phi(1) solves the equation";
            rep.verdict = ExistenceVerdict::Exists;
        } else if (k * std::abs(theta1) == 0.0) {
            c.status = ConditionStatus::Pass;
            c.evidence = "Phi(1) = 0 and K Theta(1) = 0: the zero field solves the equation";
            rep.verdict = ExistenceVerdict::Exists;
        } else {
            c.evidence = "Phi(1) = 0 but K Theta(1) != 0: no constant solution; no criterion applies";
            rep.verdict = ExistenceVerdict::Unknown;
        }
        rep.conditions.push_back(std::move(c));
        rep.summary = "deterministic-noise reduction";
        return rep;
    }

    const SpectralClassification l2 = l2_spectral_sequence(model, opt.quadrature.levels > 0 ? opt.quadrature.levels
                                                                                            : (model.dim <= 3 ? 4 : 3),
                                                           opt.quadrature.base_resolution);
    Condition l2cond{"Theta/Phi in L^2(T^d)", ConditionStatus::Unknown, "", "L^2 spectral condition (necessary and sufficient for weak stationarity; necessary here)"};
    l2cond.evidence = "quadrature verdict: " + std::string(to_string(l2.verdict)) +
                      ", last estimate " + detail::fmt(l2.estimates.empty() ? 0.0 : l2.estimates.back());
    if (l2.verdict == Verdict::Divergent) {
        l2cond.status = ConditionStatus::Fail;
        rep.conditions.push_back(std::move(l2cond));
        rep.verdict = ExistenceVerdict::NotExists;
        rep.summary = "spectral quadrature diverges: no linear strictly stationary solution";
        return rep;
    }
    if (l2.verdict == Verdict::Finite) l2cond.status = ConditionStatus::Pass;
    rep.conditions.push_back(std::move(l2cond));

    const TorusZeroSearch zs = zero_search_torus(phi, opt.zero_tol);
    Condition zfree{"Phi zero-free on T^d", ConditionStatus::Unknown, "", "zero-free torus symbol + log-moment sufficiency"};
    const bool no_zero_found = zs.zeros.empty();
    zfree.status = no_zero_found ? ConditionStatus::Pass : ConditionStatus::Fail;
    zfree.evidence = no_zero_found
                         ? "no torus zero found at final resolution (certificate-free); min |Phi| = " + detail::fmt(zs.min_value)
                         : "torus zero located, |Phi| = " + detail::fmt(zs.min_value);
    rep.conditions.push_back(zfree);

    Condition logm{"E log_+^d |Z| finite", noise.has_log_moment(model.dim) ? ConditionStatus::Pass : ConditionStatus::Fail,
                   noise.name(), "log-moment condition for a.s. absolute convergence"};
    rep.conditions.push_back(logm);

    if (no_zero_found && noise.has_log_moment(model.dim)) {
        rep.verdict = ExistenceVerdict::Exists;
        rep.summary = "zero-free symbol and finite log moments: linear strictly stationary solution exists";
        MultiIndex keep = MultiIndex::zero(model.dim);
        for (int i = 0; i < model.dim; ++i) keep[i] = opt.psi_keep;
        int grid_m = 8;
        while (grid_m < 4 * (2 * opt.psi_keep + 1)) grid_m <<= 1;
        std::int64_t cells = 1;
        bool feasible = true;
        for (int i = 0; i < model.dim; ++i) {
            cells *= grid_m;
            if (cells > NdArray::kMaxElements) feasible = false;
        }
        if (feasible) {
            CoefficientField psi = fourier_psi(model, TorusGrid::uniform(model.dim, grid_m), keep);
            attach_decay_fit(psi);
            rep.solution_coefficients = std::move(psi);
        }
        return rep;
    }
    rep.verdict = ExistenceVerdict::Unknown;
    rep.summary = "neither the necessary refutation nor the sufficient construction applies";
    return rep;
}

/// Existence of a causal solution for R, S in the nonnegative orthant.
/// Necessary: Theta/Phi in H^2, judged by the dyadic pattern of the partial
/// power-series norms (for 2D pure AR models a located bidisc zero also
/// refutes). Sufficient legs: (i) finite d-th log moment with a zero-free
/// closed polydisc; (ii) zero mean, finite variance, and the H^2 pattern.
inline ExistenceReport check_causal(const ModelSpec& model, const NoiseSpec& noise, const CheckOptions& opt = {}) {
    model.validate();
    if (!model.causal_mode()) throw std::domain_error("check_causal: model must be causal-mode");
    if (!noise.nondeterministic()) throw std::invalid_argument("check_causal: noise must be nondeterministic");
    if (detail::trivial_model(model)) return detail::trivial_report(CheckMode::Causal, model.dim);
    ExistenceReport rep;
    rep.mode = CheckMode::Causal;
    auto [phi, theta] = arma_polys(model);

    const int box = opt.alpha_box > 0 ? opt.alpha_box : detail::auto_alpha_box(model.dim);
    MultiIndex upper = MultiIndex::zero(model.dim);
    for (int i = 0; i < model.dim; ++i) upper[i] = box;
    CoefficientField alpha = causal_alpha(model, upper);
    const IncrementPattern h2 = detail::h2_pattern(alpha, box);

    Condition h2cond{"Theta/Phi in H^2", ConditionStatus::Unknown, "", "Hardy-space square-summability (necessary for causal solutions)"};
    h2cond.evidence = "dyadic partial-norm pattern: " + std::string(to_string(h2.verdict));
    if (h2.verdict == Verdict::Divergent) h2cond.status = ConditionStatus::Fail;
    if (h2.verdict == Verdict::Finite) h2cond.status = ConditionStatus::Pass;
    rep.conditions.push_back(h2cond);

    const PolydiscZeroSearch pd = zero_free_closed_polydisc(phi, opt.zero_tol);
    Condition pdcond{"Phi zero-free on closed polydisc", pd.zero_free_likely ? ConditionStatus::Pass : ConditionStatus::Fail,
                     pd.zero_free_likely ? "no zero found (certificate-free), min |Phi| = " + detail::fmt(pd.min_modulus)
                                         : "zero located, |Phi| = " + detail::fmt(pd.min_modulus),
                     "zero-free closed polydisc (sufficient leg; necessary for 2D pure AR)"};
    rep.conditions.push_back(pdcond);

    const bool two_d_pure_ar = (model.dim == 2 && model.ma.empty());
    if (h2.verdict == Verdict::Divergent || (two_d_pure_ar && !pd.zero_free_likely)) {
        rep.verdict = ExistenceVerdict::NotExists;
        rep.summary = h2.verdict == Verdict::Divergent
                          ? "partial power-series norms diverge: Theta/Phi is not in H^2"
                          : "2D autoregressive model with a zero on the closed bidisc";
        return rep;
    }

    Condition logm{"E log_+^d |Z| finite", noise.has_log_moment(model.dim) ? ConditionStatus::Pass : ConditionStatus::Fail,
                   noise.name(), "log-moment + zero-free polydisc (sufficient leg i)"};
    rep.conditions.push_back(logm);
    Condition l2mom{"E|Z|^2 finite, E Z = 0",
                    (noise.finite_second_moment() && noise.mean_zero()) ? ConditionStatus::Pass : ConditionStatus::Fail,
                    noise.name(), "mean-zero finite-variance + H^2 (sufficient leg ii)"};
    rep.conditions.push_back(l2mom);

    const bool leg_i = pd.zero_free_likely && noise.has_log_moment(model.dim);
    const bool leg_ii = noise.finite_second_moment() && noise.mean_zero() && h2.verdict == Verdict::Finite;
    if (leg_i || leg_ii) {
        rep.verdict = ExistenceVerdict::Exists;
        rep.summary = leg_i ? "sufficient leg (i): zero-free closed polydisc and finite log moments"
                            : "sufficient leg (ii): zero-mean finite-variance noise and square-summable coefficients";
        rep.solution_coefficients = std::move(alpha);
        return rep;
    }
    rep.verdict = ExistenceVerdict::Unknown;
    rep.summary = "necessary conditions hold as far as tested, but no sufficient leg fires";
    return rep;
}

/// Full characterization for the first-order 2D autoregressive model:
/// existence iff the bilinear symbol is zero-free on the closed bidisc and the
/// noise has the structural log moment (second when at least two coefficients
/// are nonzero, first otherwise). Never returns Unknown.
inline ExistenceReport check_first_order_2d(double phi1, double phi2, double phi3, const NoiseSpec& noise,
                                            int coeff_box = 16) {
    if (phi1 == 0.0 && phi2 == 0.0 && phi3 == 0.0)
        throw std::invalid_argument("check_first_order_2d: all coefficients are zero");
    if (!noise.nondeterministic()) throw std::invalid_argument("check_first_order_2d: noise must be nondeterministic");
    ExistenceReport rep;
    rep.mode = CheckMode::FirstOrder2D;

    const BilinearBidiscResult zf = bidisc_zero_free_bilinear(phi1, phi2, phi3);
    Condition zcond{"Phi zero-free on closed bidisc", zf.zero_free ? ConditionStatus::Pass : ConditionStatus::Fail,
                    zf.zero_free ? "min |Phi| = " + detail::fmt(zf.min_modulus)
                                 : "zero at z1 = " + detail::fmt(zf.z1.real()) + "+" + detail::fmt(zf.z1.imag()) +
                                       "i, z2 = " + detail::fmt(zf.z2.real()) + "+" + detail::fmt(zf.z2.imag()) + "i",
                    "first-order 2D characterization, zero-freeness leg"};
    rep.conditions.push_back(zcond);

    const int nonzero = (phi1 != 0.0 ? 1 : 0) + (phi2 != 0.0 ? 1 : 0) + (phi3 != 0.0 ? 1 : 0);
    const int needed = nonzero >= 2 ? 2 : 1;
    Condition mcond{needed == 2 ? "E log_+^2 |Z| finite" : "E log_+ |Z| finite",
                    noise.has_log_moment(needed) ? ConditionStatus::Pass : ConditionStatus::Fail, noise.name(),
                    "first-order 2D characterization, log-moment leg"};
    rep.conditions.push_back(mcond);

    if (zf.zero_free && noise.has_log_moment(needed)) {
        rep.verdict = ExistenceVerdict::Exists;
        rep.summary = "zero-free bidisc and the structural log moment: unique symmetric causal solution";
        const ModelSpec m = ModelSpec::first_order(phi1, phi2, phi3);
        MultiIndex upper{coeff_box, coeff_box};
        CoefficientField coeffs = causal_alpha(m, upper);
        attach_decay_fit(coeffs);
        rep.solution_coefficients = std::move(coeffs);
    } else {
        rep.verdict = ExistenceVerdict::NotExists;
        rep.summary = zf.zero_free ? "missing log moment refutes existence" : "zero on the closed bidisc refutes existence";
    }
    return rep;
}

}  // namespace sarma
