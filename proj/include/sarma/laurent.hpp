#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "sarma/fft.hpp"
#include "sarma/multi_index.hpp"
#include "sarma/ndarray.hpp"

namespace sarma {

using cdouble = std::complex<double>;

/// z^n for signed n; z == 0 with n < 0 is a domain error.
inline cdouble pow_int(cdouble z, long n) {
    if (n < 0) {
        if (z == cdouble{0.0, 0.0}) throw std::domain_error("pow_int: zero raised to negative power");
        z = 1.0 / z;
        n = -n;
    }
    cdouble r{1.0, 0.0};
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

/// Finitely supported Laurent polynomial on Z^d with complex coefficients.
/// Zero coefficients are never stored; the term map is ordered, so iteration
/// (and therefore every accumulation over terms) has a fixed canonical order.
class LaurentPoly {
public:
    static constexpr int kMaxExponent = 1 << 20;

    explicit LaurentPoly(int dim) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("LaurentPoly: dimension must be positive");
    }

    static LaurentPoly constant(int dim, cdouble c) {
        LaurentPoly p(dim);
        p.set(MultiIndex::zero(dim), c);
        return p;
    }

    int dim() const { return dim_; }
    const std::map<MultiIndex, cdouble>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    cdouble coeff(const MultiIndex& n) const {
        auto it = terms_.find(n);
        return it == terms_.end() ? cdouble{0.0, 0.0} : it->second;
    }

    void set(const MultiIndex& n, cdouble c) {
        check_index(n);
        if (c == cdouble{0.0, 0.0})
            terms_.erase(n);
        else
            terms_[n] = c;
    }

    void add(const MultiIndex& n, cdouble c) { set(n, coeff(n) + c); }

    bool has_negative_exponents() const {
        for (const auto& [n, c] : terms_)
            if (!n.is_nonnegative()) return true;
        return false;
    }

    /// Sum of |c_n|; the natural scale for relative comparisons.
    double coefficient_scale() const {
        double s = 0.0;
        for (const auto& [n, c] : terms_) s += std::abs(c);
        return s;
    }

    /// Exact pointwise evaluation sum c_n point^n.
    cdouble eval(std::span<const cdouble> point) const {
        if (static_cast<int>(point.size()) != dim_) throw dimension_error("LaurentPoly::eval: point dimension mismatch");
        cdouble acc{0.0, 0.0};
        for (const auto& [n, c] : terms_) {
            cdouble mono{1.0, 0.0};
            for (int i = 0; i < dim_; ++i) mono *= pow_int(point[static_cast<std::size_t>(i)], n[i]);
            acc += c * mono;
        }
        return acc;
    }

    cdouble eval(const std::vector<cdouble>& point) const { return eval(std::span<const cdouble>(point)); }

    /// Evaluation at e^{-i t}, t in T^d.
    cdouble eval_torus(const std::vector<double>& t) const {
        if (static_cast<int>(t.size()) != dim_) throw dimension_error("LaurentPoly::eval_torus: dimension mismatch");
        std::vector<cdouble> z(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) z[i] = std::polar(1.0, -t[i]);
        return eval(z);
    }

    LaurentPoly operator*(const LaurentPoly& o) const {
        if (dim_ != o.dim_) throw dimension_error("LaurentPoly::operator*: dimension mismatch");
        LaurentPoly r(dim_);
        for (const auto& [n, c] : terms_)
            for (const auto& [m, e] : o.terms_) r.add(n + m, c * e);
        return r;
    }

    LaurentPoly operator+(const LaurentPoly& o) const {
        if (dim_ != o.dim_) throw dimension_error("LaurentPoly::operator+: dimension mismatch");
        LaurentPoly r(*this);
        for (const auto& [m, e] : o.terms_) r.add(m, e);
        return r;
    }

private:
    void check_index(const MultiIndex& n) const {
        if (n.dim() != dim_) throw dimension_error("LaurentPoly: index dimension mismatch");
        for (int i = 0; i < dim_; ++i)
            if (std::abs(n[i]) > kMaxExponent) throw std::invalid_argument("LaurentPoly: exponent exceeds supported range");
    }

    int dim_;
    std::map<MultiIndex, cdouble> terms_;
};

/// Samples p(e^{-i t_j}) on the uniform grid t_j = 2 pi j / M, by zero-embedding
/// the coefficients (exponents wrapped mod M, which is exact on the grid) and
/// applying a multidimensional DFT.
inline NdArray eval_torus_grid(const LaurentPoly& p, const std::vector<int>& resolution) {
    if (static_cast<int>(resolution.size()) != p.dim())
        throw dimension_error("eval_torus_grid: resolution dimension mismatch");
    for (int m : resolution)
        if (m < 1) throw std::invalid_argument("eval_torus_grid: resolution must be >= 1");
    NdArray grid{resolution};
    std::vector<int> idx(resolution.size());
    for (const auto& [n, c] : p.terms()) {
        for (int i = 0; i < p.dim(); ++i) {
            const int m = resolution[static_cast<std::size_t>(i)];
            int r = n[i] % m;
            if (r < 0) r += m;
            idx[static_cast<std::size_t>(i)] = r;
        }
        grid.at(idx) += c;
    }
    fft::transform_nd(grid, false);
    return grid;
}

}  // namespace sarma
