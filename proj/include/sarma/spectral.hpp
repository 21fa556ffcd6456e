#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarma/bilinear.hpp"
#include "sarma/classify.hpp"
#include "sarma/fft.hpp"
#include "sarma/laurent.hpp"
#include "sarma/model.hpp"
#include "sarma/multi_index.hpp"
#include "sarma/ndarray.hpp"
#include "sarma/parallel.hpp"

namespace sarma {

/// Grid nodes t_j = 2 pi j / M on T^d.
struct TorusGrid {
    int dim = 0;
    std::vector<int> resolution;

    TorusGrid(int d, std::vector<int> res) : dim(d), resolution(std::move(res)) {
        if (static_cast<int>(resolution.size()) != dim) throw dimension_error("TorusGrid: resolution dimension mismatch");
        for (int m : resolution)
            if (m < 2) throw std::invalid_argument("TorusGrid: resolution must be >= 2");
    }

    static TorusGrid uniform(int d, int m) { return TorusGrid(d, std::vector<int>(static_cast<std::size_t>(d), m)); }
};

/// Quadrature nodes with |Phi| below this floor are skipped; the zero set of a
/// nonzero polynomial symbol is a null set, so finitely many skipped nodes do
/// not move the Riemann-sum limit.
inline constexpr double kNodeFloor = 1e-13;

enum class SupportKind { FullLattice, CausalOrthant };

/// Exponential envelope |psi_k| <= amplitude * exp(-rate * |k|_1).
struct DecayFit {
    double amplitude = 0.0;
    double rate = 0.0;
};

/// Map from multi-indices to complex values (psi_k or alpha_k). Backed either
/// by a sparse ordered map or by a dense box [0, upper]^d for causal fills;
/// iteration is lexicographic in both representations.
class CoefficientField {
public:
    CoefficientField(int dim, SupportKind kind) : dim_(dim), kind_(kind) {
        if (dim < 1) throw std::invalid_argument("CoefficientField: dimension must be positive");
    }

    static CoefficientField causal_box(const MultiIndex& upper, std::vector<cdouble> values) {
        CoefficientField f(upper.dim(), SupportKind::CausalOrthant);
        if (!upper.is_nonnegative()) throw std::invalid_argument("CoefficientField: box upper bound must be nonnegative");
        std::int64_t n = 1;
        for (int i = 0; i < upper.dim(); ++i) n *= upper[i] + 1;
        if (n != static_cast<std::int64_t>(values.size()))
            throw std::invalid_argument("CoefficientField: value count does not match box");
        f.dense_upper_ = upper;
        f.dense_ = std::move(values);
        return f;
    }

    int dim() const { return dim_; }
    SupportKind support_kind() const { return kind_; }
    bool dense() const { return !dense_.empty(); }

    const std::optional<DecayFit>& decay() const { return fit_; }
    void set_decay(std::optional<DecayFit> fit) { fit_ = std::move(fit); }

    void set(const MultiIndex& k, cdouble v) {
        if (dense()) throw std::logic_error("CoefficientField: dense field is immutable");
        if (k.dim() != dim_) throw dimension_error("CoefficientField: index dimension mismatch");
        if (kind_ == SupportKind::CausalOrthant && !k.is_nonnegative())
            throw std::invalid_argument("CoefficientField: causal-orthant field cannot hold negative indices");
        if (v == cdouble{0.0, 0.0})
            sparse_.erase(k);
        else
            sparse_[k] = v;
    }

    cdouble at(const MultiIndex& k) const {
        if (k.dim() != dim_) throw dimension_error("CoefficientField: index dimension mismatch");
        if (dense()) {
            std::int64_t flat = 0;
            for (int i = 0; i < dim_; ++i) {
                if (k[i] < 0 || k[i] > dense_upper_[i]) return {0.0, 0.0};
                flat = flat * (dense_upper_[i] + 1) + k[i];
            }
            return dense_[static_cast<std::size_t>(flat)];
        }
        auto it = sparse_.find(k);
        return it == sparse_.end() ? cdouble{0.0, 0.0} : it->second;
    }

    std::int64_t stored_count() const {
        return dense() ? static_cast<std::int64_t>(dense_.size()) : static_cast<std::int64_t>(sparse_.size());
    }

    /// Visits (index, value) pairs in lexicographic index order.
    template <class F>
    void for_each(F&& fn) const {
        if (dense()) {
            MultiIndex k = MultiIndex::zero(dim_);
            for (const cdouble& v : dense_) {
                fn(static_cast<const MultiIndex&>(k), v);
                for (int a = dim_ - 1; a >= 0; --a) {
                    if (++k[a] <= dense_upper_[a]) break;
                    k[a] = 0;
                }
            }
        } else {
            for (const auto& [k, v] : sparse_) fn(k, v);
        }
    }

    /// Largest shell |k| <= s whose entries are all exactly represented.
    /// Sparse fields store their entire support (absent means zero), so every
    /// shell is complete; a dense box is truncated, so shells are only
    /// trustworthy up to the smallest axis bound.
    long complete_shell_bound() const {
        if (dense()) {
            int s = dense_upper_[0];
            for (int i = 0; i < dim_; ++i) s = std::min(s, dense_upper_[i]);
            return s;
        }
        long s = 0;
        for (const auto& [k, v] : sparse_) {
            (void)v;
            s = std::max(s, k.l1_norm());
        }
        return s;
    }

    /// Declares the box the field was computed on. Exact zeros inside it are
    /// not stored, so the stored key hull can undershoot what is actually
    /// known; the nominal box keeps truncation checks honest.
    void set_nominal_bounds(MultiIndex lo, MultiIndex hi) {
        nominal_lo_ = std::move(lo);
        nominal_hi_ = std::move(hi);
    }

    /// Componentwise bounds of the known region: the dense box, the declared
    /// nominal box, or the hull of the stored keys.
    std::pair<MultiIndex, MultiIndex> support_bounds() const {
        if (dense()) return {MultiIndex::zero(dim_), dense_upper_};
        if (nominal_lo_.dim() == dim_) return {nominal_lo_, nominal_hi_};
        if (sparse_.empty()) return {MultiIndex::zero(dim_), MultiIndex::zero(dim_)};
        MultiIndex lo = sparse_.begin()->first, hi = lo;
        for (const auto& [k, v] : sparse_) {
            (void)v;
            for (int i = 0; i < dim_; ++i) {
                lo[i] = std::min(lo[i], k[i]);
                hi[i] = std::max(hi[i], k[i]);
            }
        }
        return {lo, hi};
    }

private:
    int dim_;
    SupportKind kind_;
    std::map<MultiIndex, cdouble> sparse_;
    MultiIndex dense_upper_;
    std::vector<cdouble> dense_;
    MultiIndex nominal_lo_, nominal_hi_;
    std::optional<DecayFit> fit_;
};

/// Raised when a transform-based extraction would alias unboundedly.
struct aliasing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Torus quadrature of |Theta/Phi|^2
// ---------------------------------------------------------------------------

struct SpectralClassification {
    Verdict verdict = Verdict::Inconclusive;
    double value = 0.0;  // final estimate when verdict == Finite
    std::vector<int> resolutions;
    std::vector<double> estimates;
    std::vector<double> increments;
    std::vector<double> ratios;
    std::vector<double> skip_fraction;
    std::string diagnostic;
};

struct QuadratureOptions {
    int base_resolution = 0;  // 0: 32 for d <= 3, 8 for d >= 4
    int levels = 0;           // 0: 4 for d <= 3, 3 for d >= 4
};

namespace detail {

struct SymbolTerm {
    cdouble coeff;
    std::vector<int> exps;
    std::vector<std::vector<cdouble>> axis_table;  // e^{-i n_i t} per axis
};

inline std::vector<SymbolTerm> build_terms(const LaurentPoly& p, int m) {
    std::vector<SymbolTerm> terms;
    for (const auto& [n, c] : p.terms()) {
        SymbolTerm t;
        t.coeff = c;
        t.exps.assign(n.entries().begin(), n.entries().end());
        t.axis_table.resize(t.exps.size());
        for (std::size_t a = 0; a < t.exps.size(); ++a) {
            auto& tab = t.axis_table[a];
            tab.resize(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) {
                const double ang = -2.0 * std::numbers::pi * static_cast<double>(t.exps[a]) *
                                   (static_cast<double>(j) / static_cast<double>(m));
                tab[static_cast<std::size_t>(j)] = {std::cos(ang), std::sin(ang)};
            }
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

/// Mean of |Theta/Phi|^2 over the uniform M^d grid, skipping nodes with
/// |Phi| < kNodeFloor. Streams the grid without materializing it; rows are
/// reduced in fixed tile order, so the result is thread-count independent.
inline std::pair<double, std::int64_t> mean_ratio_squared(const LaurentPoly& phi, const LaurentPoly& theta, int m) {
    const int d = phi.dim();
    const bool theta_is_one = theta.terms().size() == 1 && theta.coeff(MultiIndex::zero(d)) == cdouble{1.0, 0.0};
    auto phi_terms = build_terms(phi, m);
    auto theta_terms = theta_is_one ? std::vector<SymbolTerm>{} : build_terms(theta, m);

    std::int64_t rows = 1;
    for (int a = 0; a < d - 1; ++a) rows *= m;
    const std::int64_t tile_rows = std::max<std::int64_t>(1, 32768 / m);
    const std::int64_t n_tiles = (rows + tile_rows - 1) / tile_rows;
    std::vector<double> tile_sum(static_cast<std::size_t>(n_tiles), 0.0);
    std::vector<std::int64_t> tile_skip(static_cast<std::size_t>(n_tiles), 0);

    parallel_tiles(n_tiles, [&](std::int64_t tile) {
        double acc = 0.0;
        std::int64_t skip = 0;
        std::vector<int> outer(static_cast<std::size_t>(d > 1 ? d - 1 : 0));
        std::vector<cdouble> phi_active, theta_active;
        std::vector<const cdouble*> phi_tab, theta_tab;
        const std::int64_t row_lo = tile * tile_rows;
        const std::int64_t row_hi = std::min(rows, row_lo + tile_rows);
        for (std::int64_t row = row_lo; row < row_hi; ++row) {
            std::int64_t rem = row;
            for (int a = d - 2; a >= 0; --a) {
                outer[static_cast<std::size_t>(a)] = static_cast<int>(rem % m);
                rem /= m;
            }
            auto prepare = [&](const std::vector<SymbolTerm>& terms, cdouble& base, std::vector<cdouble>& active,
                               std::vector<const cdouble*>& tabs) {
                base = {0.0, 0.0};
                active.clear();
                tabs.clear();
                for (const auto& t : terms) {
                    cdouble rf = t.coeff;
                    for (int a = 0; a < d - 1; ++a)
                        rf *= t.axis_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(outer[static_cast<std::size_t>(a)])];
                    if (t.exps[static_cast<std::size_t>(d - 1)] == 0) {
                        base += rf;
                    } else {
                        active.push_back(rf);
                        tabs.push_back(t.axis_table[static_cast<std::size_t>(d - 1)].data());
                    }
                }
            };
            cdouble phi_base, theta_base{1.0, 0.0};
            prepare(phi_terms, phi_base, phi_active, phi_tab);
            if (!theta_is_one) prepare(theta_terms, theta_base, theta_active, theta_tab);
            for (int j = 0; j < m; ++j) {
                cdouble pv = phi_base;
                for (std::size_t t = 0; t < phi_active.size(); ++t) pv += phi_active[t] * phi_tab[t][j];
                const double pn = std::norm(pv);
                if (pn < kNodeFloor * kNodeFloor) {
                    ++skip;
                    continue;
                }
                if (theta_is_one) {
                    acc += 1.0 / pn;
                } else {
                    cdouble tv = theta_base;
                    for (std::size_t t = 0; t < theta_active.size(); ++t) tv += theta_active[t] * theta_tab[t][j];
                    acc += std::norm(tv) / pn;
                }
            }
        }
        tile_sum[static_cast<std::size_t>(tile)] = acc;
        tile_skip[static_cast<std::size_t>(tile)] = skip;
    });

    double total = 0.0;
    std::int64_t skipped = 0;
    for (std::size_t t = 0; t < tile_sum.size(); ++t) {
        total += tile_sum[t];
        skipped += tile_skip[t];
    }
    return {total, skipped};
}

}  // namespace detail

/// Quadrature sequence for the L^2(T^d) condition on Theta/Phi, normalized by
/// the measure (2 pi)^{-d} lambda^d: estimates[l] is the mean of |Theta/Phi|^2
/// over the grid with resolution base * 2^l per axis. The verdict follows the
/// refinement-increment pattern; when every level skips more than 1e-3 of its
/// nodes the result is Inconclusive with a diagnostic.
inline SpectralClassification l2_spectral_sequence(const ModelSpec& model, int levels, int base_resolution = 0) {
    model.validate();
    if (levels < 2) throw std::invalid_argument("l2_spectral_sequence: need at least two levels");
    auto [phi, theta] = arma_polys(model);
    if (phi.empty()) throw std::invalid_argument("l2_spectral_sequence: Phi is identically zero");
    if (base_resolution == 0) base_resolution = model.dim <= 3 ? 32 : 8;

    SpectralClassification out;
    bool all_levels_degenerate = true;
    for (int l = 0; l < levels; ++l) {
        const int m = base_resolution << l;
        std::int64_t nodes = 1;
        for (int a = 0; a < model.dim; ++a) nodes *= m;
        auto [sum, skipped] = detail::mean_ratio_squared(phi, theta, m);
        const std::int64_t kept = nodes - skipped;
        const double frac = static_cast<double>(skipped) / static_cast<double>(nodes);
        out.resolutions.push_back(m);
        out.estimates.push_back(kept > 0 ? sum / static_cast<double>(kept) : 0.0);
        out.skip_fraction.push_back(frac);
        if (frac <= 1e-3) all_levels_degenerate = false;
    }
    if (all_levels_degenerate) {
        out.verdict = Verdict::Inconclusive;
        out.diagnostic = "Phi vanishes on more than 1e-3 of the grid nodes at every level; "
                         "the symbol appears to vanish on a subvariety hit by the grid";
        return out;
    }
    IncrementPattern pat = classify_increments(out.estimates);
    out.verdict = pat.verdict;
    out.increments = pat.increments;
    out.ratios = pat.ratios;
    out.diagnostic = pat.note;
    if (out.verdict == Verdict::Finite) out.value = out.estimates.back();
    return out;
}

inline SpectralClassification l2_spectral_sequence(const ModelSpec& model, const QuadratureOptions& opt) {
    const int levels = opt.levels > 0 ? opt.levels : (model.dim <= 3 ? 4 : 3);
    return l2_spectral_sequence(model, levels, opt.base_resolution);
}

// ---------------------------------------------------------------------------
// Coefficient extraction
// ---------------------------------------------------------------------------

/// Fourier coefficients psi_k of Theta/Phi restricted to |k_i| <= keep_box_i,
/// extracted with an inverse transform of the sampled quotient; grid indices
/// above M/2 wrap to the signed range. Refuses when |Phi| underflows the node
/// floor anywhere on the grid, since the quotient then aliases unboundedly.
inline CoefficientField fourier_psi(const ModelSpec& model, const TorusGrid& grid, const MultiIndex& keep_box) {
    model.validate();
    if (grid.dim != model.dim || keep_box.dim() != model.dim) throw dimension_error("fourier_psi: dimension mismatch");
    for (int i = 0; i < model.dim; ++i) {
        const int span = 2 * keep_box[i] + 1;
        if (keep_box[i] < 0) throw std::invalid_argument("fourier_psi: keep box must be nonnegative");
        if (grid.resolution[static_cast<std::size_t>(i)] < 2 * span)
            throw std::invalid_argument("fourier_psi: grid must cover the keep box with at least 2x margin");
    }
    auto [phi, theta] = arma_polys(model);
    NdArray quot = eval_torus_grid(phi, grid.resolution);
    for (std::int64_t i = 0; i < quot.size(); ++i)
        if (std::abs(quot[i]) < kNodeFloor)
            throw aliasing_error("fourier_psi: |Phi| underflows the node floor on the sampling grid");
    const bool theta_is_one = theta.terms().size() == 1 && theta.coeff(MultiIndex::zero(model.dim)) == cdouble{1.0, 0.0};
    if (theta_is_one) {
        for (std::int64_t i = 0; i < quot.size(); ++i) quot[i] = 1.0 / quot[i];
    } else {
        NdArray tg = eval_torus_grid(theta, grid.resolution);
        for (std::int64_t i = 0; i < quot.size(); ++i) quot[i] = tg[i] / quot[i];
    }
    fft::transform_nd(quot, true);

    CoefficientField psi(model.dim, SupportKind::FullLattice);
    {
        MultiIndex lo = MultiIndex::zero(model.dim), hi = MultiIndex::zero(model.dim);
        for (int i = 0; i < model.dim; ++i) {
            lo[i] = -keep_box[i];
            hi[i] = keep_box[i];
        }
        psi.set_nominal_bounds(std::move(lo), std::move(hi));
    }
    std::vector<int> extents(static_cast<std::size_t>(model.dim));
    for (int i = 0; i < model.dim; ++i) extents[static_cast<std::size_t>(i)] = 2 * keep_box[i] + 1;
    std::vector<int> idx(static_cast<std::size_t>(model.dim), 0);
    std::vector<int> gidx(static_cast<std::size_t>(model.dim));
    do {
        MultiIndex k = MultiIndex::zero(model.dim);
        for (int i = 0; i < model.dim; ++i) {
            k[i] = idx[static_cast<std::size_t>(i)] - keep_box[i];
            const int m = grid.resolution[static_cast<std::size_t>(i)];
            gidx[static_cast<std::size_t>(i)] = (k[i] % m + m) % m;
        }
        psi.set(k, quot.at(gidx));
    } while (NdArray::next_index(idx, extents));
    return psi;
}

/// Power-series coefficients alpha_k of Theta/Phi on the box [0, N], computed
/// by the causal recursion alpha_k = theta_k[k in S] + sum_{n in R, n <= k}
/// phi_n alpha_{k-n}, alpha_0 = 1, in lexicographic order. The inner sum runs
/// over R in canonical (sorted) order, so recomputation along any dependency-
/// respecting traversal reproduces the values bit for bit.
inline CoefficientField causal_alpha(const ModelSpec& model, const MultiIndex& box_upper) {
    model.validate();
    if (!model.causal_mode())
        throw std::domain_error("causal_alpha: model must be causal-mode (R, S in the nonnegative orthant)");
    if (box_upper.dim() != model.dim) throw dimension_error("causal_alpha: box dimension mismatch");
    if (!box_upper.is_nonnegative()) throw std::invalid_argument("causal_alpha: box must be nonnegative");

    std::vector<int> extents(static_cast<std::size_t>(model.dim));
    std::int64_t total = 1;
    for (int i = 0; i < model.dim; ++i) {
        extents[static_cast<std::size_t>(i)] = box_upper[i] + 1;
        total *= box_upper[i] + 1;
        if (total > NdArray::kMaxElements) throw std::invalid_argument("causal_alpha: box exceeds memory guard");
    }
    std::vector<cdouble> alpha(static_cast<std::size_t>(total), cdouble{0.0, 0.0});
    std::vector<std::pair<std::vector<int>, cdouble>> ar_terms;
    for (const auto& [n, c] : model.ar) ar_terms.emplace_back(std::vector<int>(n.entries()), c);

    std::vector<int> k(static_cast<std::size_t>(model.dim), 0);
    std::int64_t flat = 0;
    do {
        cdouble v{0.0, 0.0};
        bool at_origin = true;
        for (int i = 0; i < model.dim; ++i) at_origin &= (k[static_cast<std::size_t>(i)] == 0);
        if (at_origin) {
            v = 1.0;
        } else {
            MultiIndex kk{std::vector<int>(k)};
            auto it = model.ma.find(kk);
            if (it != model.ma.end()) v = it->second;
            for (const auto& [n, c] : ar_terms) {
                std::int64_t pflat = 0;
                bool inside = true;
                for (int i = 0; i < model.dim; ++i) {
                    const int d = k[static_cast<std::size_t>(i)] - n[static_cast<std::size_t>(i)];
                    if (d < 0) {
                        inside = false;
                        break;
                    }
                    pflat = pflat * extents[static_cast<std::size_t>(i)] + d;
                }
                if (inside) v += c * alpha[static_cast<std::size_t>(pflat)];
            }
        }
        alpha[static_cast<std::size_t>(flat)] = v;
        ++flat;
    } while (NdArray::next_index(k, extents));
    return CoefficientField::causal_box(box_upper, std::move(alpha));
}

/// Partial sums of |alpha_k|^2 over L1 shells |k| <= s, s = 0..shells.
inline std::vector<double> h2_partial_norms(const CoefficientField& c, int shells) {
    if (c.support_kind() != SupportKind::CausalOrthant)
        throw std::invalid_argument("h2_partial_norms: field must be causal-orthant");
    if (shells < 0) throw std::invalid_argument("h2_partial_norms: shells must be nonnegative");
    std::vector<double> mass(static_cast<std::size_t>(shells) + 1, 0.0);
    c.for_each([&](const MultiIndex& k, cdouble v) {
        const long s = k.l1_norm();
        if (s <= shells) mass[static_cast<std::size_t>(s)] += std::norm(v);
    });
    for (std::size_t s = 1; s < mass.size(); ++s) mass[s] += mass[s - 1];
    return mass;
}

// ---------------------------------------------------------------------------
// Decay envelope
// ---------------------------------------------------------------------------

/// Least-squares exponential envelope through the nonzero entries; returned
/// only when, after inflating the amplitude by 1.05, it dominates every stored
/// entry. Entries below 1e-12 of the peak are treated as numerical floor: they
/// are excluded from the fit but still checked for dominance. A field
/// supported at the origin only gets the (|c_0|, +inf) sentinel.
inline std::optional<DecayFit> fit_exponential_decay(const CoefficientField& c) {
    double peak = 0.0;
    long max_s = 0;
    bool any = false;
    c.for_each([&](const MultiIndex& k, cdouble v) {
        const double a = std::abs(v);
        if (a > 0.0) {
            any = true;
            peak = std::max(peak, a);
            max_s = std::max(max_s, k.l1_norm());
        }
    });
    if (!any) throw std::invalid_argument("fit_exponential_decay: field has empty support");
    if (max_s == 0) return DecayFit{std::abs(c.at(MultiIndex::zero(c.dim()))), std::numeric_limits<double>::infinity()};

    const double floor = 1e-12 * peak;
    std::vector<std::pair<double, double>> pts;     // fit points (|k|, log|v|)
    std::vector<std::pair<double, double>> checks;  // every nonzero entry
    c.for_each([&](const MultiIndex& k, cdouble v) {
        const double a = std::abs(v);
        if (a == 0.0) return;
        const double s = static_cast<double>(k.l1_norm());
        checks.emplace_back(s, std::log(a));
        if (a > floor) pts.emplace_back(s, std::log(a));
    });
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double det = n * sxx - sx * sx;
    if (det <= 0.0) return std::nullopt;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    const double rate = -slope;
    if (!(rate > 0.0)) return std::nullopt;
    const double amplitude = 1.05 * std::exp(intercept);
    for (auto [x, y] : checks)
        if (y > std::log(amplitude) - rate * x + 1e-12) return std::nullopt;
    return DecayFit{amplitude, rate};
}

inline void attach_decay_fit(CoefficientField& c) { c.set_decay(fit_exponential_decay(c)); }

/// Chord envelope over the L1 shell maxima: rate from the tail half-chord,
/// amplitude lifted so the envelope dominates every stored entry outright.
/// Anisotropic exponential fields (different decay rates along different
/// rays) have log-convex shell maxima, which the least-squares recipe above
/// rightly rejects; the chord still describes them faithfully. A genuinely
/// subexponential field reveals itself through an unstable chord slope
/// (the full chord much steeper than the tail chord) and yields none, since
/// extrapolating a loose envelope beyond the box would be dishonest.
inline std::optional<DecayFit> dominating_envelope(const CoefficientField& c) {
    const long s_max = c.complete_shell_bound();
    std::vector<double> shell_max(static_cast<std::size_t>(s_max) + 1, 0.0);
    c.for_each([&](const MultiIndex& k, cdouble v) {
        const long s = k.l1_norm();
        if (s <= s_max) shell_max[static_cast<std::size_t>(s)] = std::max(shell_max[static_cast<std::size_t>(s)], std::abs(v));
    });
    if (shell_max[0] == 0.0) return fit_exponential_decay(c);
    if (s_max < 8) return fit_exponential_decay(c);
    const long s_half = s_max / 2;
    if (shell_max[static_cast<std::size_t>(s_half)] <= 0.0 || shell_max[static_cast<std::size_t>(s_max)] <= 0.0)
        return fit_exponential_decay(c);
    const double c_full = (std::log(shell_max[0]) - std::log(shell_max[static_cast<std::size_t>(s_max)])) / static_cast<double>(s_max);
    const double c_tail = (std::log(shell_max[static_cast<std::size_t>(s_half)]) - std::log(shell_max[static_cast<std::size_t>(s_max)])) /
                          static_cast<double>(s_max - s_half);
    if (!(c_tail > 0.0) || c_full > 1.4 * c_tail) return std::nullopt;
    const double rate = c_tail;
    double lift = 0.0;
    c.for_each([&](const MultiIndex& k, cdouble v) {
        const double a = std::abs(v);
        if (a > 0.0) lift = std::max(lift, std::log(a) + rate * static_cast<double>(k.l1_norm()));
    });
    return DecayFit{1.05 * std::exp(lift), rate};
}

// ---------------------------------------------------------------------------
// Zero searches
// ---------------------------------------------------------------------------

struct TorusZeroSearch {
    std::vector<std::vector<double>> zeros;  // angles in [0, 2pi)^d with |p(e^{-it})| <= tol
    double min_value = HUGE_VAL;             // smallest |p| found at the final refinement
    std::vector<double> min_point;
};

namespace detail {

inline double torus_abs(const LaurentPoly& p, const std::vector<double>& t) { return std::abs(p.eval_torus(t)); }

/// Direction stencil for pattern searches: the full 3^d - 1 neighbourhood up
/// to d = 3 (diagonal moves keep curved valleys from stalling the descent),
/// axis moves beyond.
inline std::vector<std::vector<double>> search_stencil(int d) {
    std::vector<std::vector<double>> dirs;
    if (d <= 3) {
        std::vector<int> ext(static_cast<std::size_t>(d), 3);
        std::vector<int> it(static_cast<std::size_t>(d), 0);
        do {
            std::vector<double> dir(static_cast<std::size_t>(d));
            bool all_zero = true;
            for (int i = 0; i < d; ++i) {
                dir[static_cast<std::size_t>(i)] = it[static_cast<std::size_t>(i)] - 1;
                all_zero &= it[static_cast<std::size_t>(i)] == 1;
            }
            if (!all_zero) dirs.push_back(std::move(dir));
        } while (NdArray::next_index(it, ext));
    } else {
        for (int a = 0; a < d; ++a)
            for (double s : {1.0, -1.0}) {
                std::vector<double> dir(static_cast<std::size_t>(d), 0.0);
                dir[static_cast<std::size_t>(a)] = s;
                dirs.push_back(std::move(dir));
            }
    }
    return dirs;
}

/// Greedy best-neighbour descent on |p(e^{-it})| with a shrinking step.
inline double pattern_search_torus(const LaurentPoly& p, std::vector<double>& t, double step) {
    const auto dirs = search_stencil(static_cast<int>(t.size()));
    double best = torus_abs(p, t);
    while (step > 1e-12 && best > 0.0) {
        for (int sweep = 0; sweep < 64; ++sweep) {
            double sweep_best = best;
            std::size_t pick = dirs.size();
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                std::vector<double> cand = t;
                for (std::size_t a = 0; a < cand.size(); ++a) cand[a] += step * dirs[i][a];
                const double v = torus_abs(p, cand);
                if (v < sweep_best) {
                    sweep_best = v;
                    pick = i;
                }
            }
            if (pick == dirs.size()) break;
            for (std::size_t a = 0; a < t.size(); ++a) t[a] += step * dirs[pick][a];
            best = sweep_best;
        }
        step *= 0.5;
    }
    return best;
}

inline void wrap_angles(std::vector<double>& t) {
    for (double& x : t) {
        x = std::fmod(x, 2.0 * std::numbers::pi);
        if (x < 0) x += 2.0 * std::numbers::pi;
    }
}

}  // namespace detail

/// Coarse-to-fine minimization of |p(e^{-it})| over T^d. Returned points all
/// satisfy |p| <= tol; an empty list is a certificate-free "none found at the
/// final resolution" with the smallest value reported.
inline TorusZeroSearch zero_search_torus(const LaurentPoly& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("zero_search_torus: tolerance must be positive");
    const int d = p.dim();
    const int m = d <= 1 ? 512 : d == 2 ? 128 : d == 3 ? 32 : d == 4 ? 12 : 8;
    const double step = 2.0 * std::numbers::pi / m;

    std::vector<int> extents(static_cast<std::size_t>(d), m);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<std::pair<double, std::vector<double>>> nodes;
    do {
        std::vector<double> t(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) t[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] * step;
        nodes.emplace_back(detail::torus_abs(p, t), std::move(t));
    } while (NdArray::next_index(idx, extents));
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t candidates = std::min<std::size_t>(nodes.size(), 24);

    TorusZeroSearch out;
    for (std::size_t i = 0; i < candidates; ++i) {
        std::vector<double> t = nodes[i].second;
        const double v = detail::pattern_search_torus(p, t, step);
        detail::wrap_angles(t);
        if (v < out.min_value) {
            out.min_value = v;
            out.min_point = t;
        }
        if (v <= tol) {
            bool duplicate = false;
            for (const auto& z : out.zeros) {
                double dist = 0.0;
                for (std::size_t a = 0; a < z.size(); ++a) {
                    double diff = std::abs(z[a] - t[a]);
                    diff = std::min(diff, 2.0 * std::numbers::pi - diff);
                    dist = std::max(dist, diff);
                }
                if (dist < 0.5 * step) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) out.zeros.push_back(t);
        }
    }
    return out;
}

struct PolydiscZeroSearch {
    bool zero_free_likely = false;
    double min_modulus = HUGE_VAL;
    std::vector<cdouble> zero;  // populated when a zero was located
};

namespace detail {

inline double polydisc_abs(const LaurentPoly& p, const std::vector<cdouble>& z) { return std::abs(p.eval(z)); }

inline void project_into_polydisc(std::vector<cdouble>& z) {
    for (auto& zi : z) {
        const double a = std::abs(zi);
        if (a > 1.0) zi /= a;
    }
}

inline double pattern_search_polydisc(const LaurentPoly& p, std::vector<cdouble>& z, double step) {
    double best = polydisc_abs(p, z);
    while (step > 1e-10 && best > 0.0) {
        for (int sweep = 0; sweep < 64; ++sweep) {
            double sweep_best = best;
            std::vector<cdouble> pick;
            for (std::size_t a = 0; a < z.size(); ++a) {
                for (cdouble dir : {cdouble{1, 0}, cdouble{-1, 0}, cdouble{0, 1}, cdouble{0, -1}}) {
                    std::vector<cdouble> cand = z;
                    cand[a] += step * dir;
                    project_into_polydisc(cand);
                    const double v = polydisc_abs(p, cand);
                    if (v < sweep_best) {
                        sweep_best = v;
                        pick = cand;
                    }
                }
            }
            if (pick.empty()) break;
            z = std::move(pick);
            best = sweep_best;
        }
        step *= 0.5;
    }
    return best;
}

/// Deterministic low-discrepancy-ish interior samples (fixed splitmix stream).
inline std::vector<std::vector<cdouble>> interior_samples(int dim, int count) {
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    auto next = [&]() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    auto u01 = [&]() { return static_cast<double>(next() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<cdouble>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::vector<cdouble> z(static_cast<std::size_t>(dim));
        for (auto& zi : z) zi = std::polar(std::sqrt(u01()), 2.0 * std::numbers::pi * u01());
        pts.push_back(std::move(z));
    }
    return pts;
}

}  // namespace detail

/// Zero search over the closed polydisc for a polynomial (nonnegative
/// exponents only). Samples the distinguished boundary at radii 1, 0.95, ...
/// plus random interior points with local refinement; a located zero is
/// certified by evaluation, while "zero-free" remains a sampled statement.
/// The bilinear first-order family is dispatched to its exact reduction.
inline PolydiscZeroSearch zero_free_closed_polydisc(const LaurentPoly& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("zero_free_closed_polydisc: tolerance must be positive");
    if (p.has_negative_exponents())
        throw std::invalid_argument("zero_free_closed_polydisc: Laurent input rejected (negative exponents)");

    PolydiscZeroSearch out;

    // Exact reduction for 1 - a z1 - b z2 - c z1 z2 with real coefficients.
    if (p.dim() == 2 && p.coeff(MultiIndex::zero(2)) == cdouble{1.0, 0.0}) {
        bool bilinear = true;
        double a = 0, b = 0, c = 0;
        for (const auto& [n, coef] : p.terms()) {
            if (coef.imag() != 0.0) {
                bilinear = false;
                break;
            }
            if (n == MultiIndex{0, 0})
                continue;
            else if (n == MultiIndex{1, 0})
                a = -coef.real();
            else if (n == MultiIndex{0, 1})
                b = -coef.real();
            else if (n == MultiIndex{1, 1})
                c = -coef.real();
            else {
                bilinear = false;
                break;
            }
        }
        if (bilinear && (a != 0.0 || b != 0.0 || c != 0.0)) {
            const BilinearBidiscResult r = bidisc_zero_free_bilinear(a, b, c, tol);
            out.zero_free_likely = r.zero_free;
            if (r.zero_free) {
                out.min_modulus = r.min_modulus;
            } else {
                out.zero = {r.z1, r.z2};
                out.min_modulus = 0.0;
            }
            return out;
        }
    }

    // Distinguished boundary and scaled tori.
    for (double r : {1.0, 0.95, 0.9, 0.8, 0.65, 0.5, 0.3, 0.1}) {
        LaurentPoly scaled(p.dim());
        for (const auto& [n, coef] : p.terms()) {
            double f = 1.0;
            for (int i = 0; i < p.dim(); ++i) f *= std::pow(r, n[i]);
            scaled.set(n, coef * f);
        }
        TorusZeroSearch search = zero_search_torus(scaled, tol);
        if (search.min_value < out.min_modulus) {
            out.min_modulus = search.min_value;
            out.zero.assign(static_cast<std::size_t>(p.dim()), cdouble{0, 0});
            for (int i = 0; i < p.dim(); ++i) out.zero[static_cast<std::size_t>(i)] = std::polar(r, -search.min_point[static_cast<std::size_t>(i)]);
        }
        if (out.min_modulus <= tol) {
            out.zero_free_likely = false;
            return out;
        }
    }

    // Interior sampling with descent.
    auto samples = detail::interior_samples(p.dim(), 64);
    std::sort(samples.begin(), samples.end(), [&](const auto& x, const auto& y) {
        return detail::polydisc_abs(p, x) < detail::polydisc_abs(p, y);
    });
    for (std::size_t i = 0; i < std::min<std::size_t>(samples.size(), 8); ++i) {
        std::vector<cdouble> z = samples[i];
        const double v = detail::pattern_search_polydisc(p, z, 0.25);
        if (v < out.min_modulus) {
            out.min_modulus = v;
            out.zero = z;
        }
        if (v <= tol) {
            out.zero_free_likely = false;
            out.zero = z;
            return out;
        }
    }
    out.zero_free_likely = true;
    out.zero.clear();
    return out;
}

}  // namespace sarma
