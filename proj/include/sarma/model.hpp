#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "sarma/laurent.hpp"
#include "sarma/multi_index.hpp"

namespace sarma {

/// Spatial ARMA equation parameters: Y_t - sum_{n in R} phi_n Y_{t-n} =
/// Z_t + sum_{n in S} theta_n Z_{t-n}. R and S are the key sets of the maps.
struct ModelSpec {
    int dim = 0;
    std::map<MultiIndex, cdouble> ar;  // phi_n, n in R
    std::map<MultiIndex, cdouble> ma;  // theta_n, n in S

    void validate() const {
        if (dim < 1) throw std::invalid_argument("ModelSpec: dimension must be positive");
        for (const auto* side : {&ar, &ma}) {
            for (const auto& [n, c] : *side) {
                if (n.dim() != dim) throw dimension_error("ModelSpec: index dimension mismatch");
                if (n.is_zero()) throw std::invalid_argument("ModelSpec: index 0 is not allowed in R or S");
                (void)c;
            }
        }
    }

    /// True when R, S are inside N_0^d \ {0}; required by the causal-mode checks.
    bool causal_mode() const {
        for (const auto* side : {&ar, &ma})
            for (const auto& [n, c] : *side) {
                (void)c;
                if (!n.is_nonnegative()) return false;
            }
        return true;
    }

    /// Largest componentwise shift appearing in R union S (componentwise max of positive parts).
    MultiIndex max_shift() const {
        MultiIndex m = MultiIndex::zero(dim);
        for (const auto* side : {&ar, &ma})
            for (const auto& [n, c] : *side) {
                (void)c;
                for (int i = 0; i < dim; ++i) m[i] = std::max(m[i], n[i]);
            }
        return m;
    }

    MultiIndex min_shift() const {
        MultiIndex m = MultiIndex::zero(dim);
        for (const auto* side : {&ar, &ma})
            for (const auto& [n, c] : *side) {
                (void)c;
                for (int i = 0; i < dim; ++i) m[i] = std::min(m[i], n[i]);
            }
        return m;
    }

    /// First-order 2D autoregressive model with AR lags (1,0), (0,1), (1,1).
    static ModelSpec first_order(double phi1, double phi2, double phi3) {
        ModelSpec m;
        m.dim = 2;
        if (phi1 != 0.0) m.ar[MultiIndex{1, 0}] = phi1;
        if (phi2 != 0.0) m.ar[MultiIndex{0, 1}] = phi2;
        if (phi3 != 0.0) m.ar[MultiIndex{1, 1}] = phi3;
        return m;
    }

    /// Recognizes the first-order 2D shape and extracts (phi1, phi2, phi3).
    bool first_order_params(double& phi1, double& phi2, double& phi3) const {
        if (dim != 2 || !ma.empty() || ar.empty()) return false;
        phi1 = phi2 = phi3 = 0.0;
        for (const auto& [n, c] : ar) {
            if (c.imag() != 0.0) return false;
            if (n == MultiIndex{1, 0})
                phi1 = c.real();
            else if (n == MultiIndex{0, 1})
                phi2 = c.real();
            else if (n == MultiIndex{1, 1})
                phi3 = c.real();
            else
                return false;
        }
        return true;
    }
};

/// Characteristic polynomials (Phi, Theta): Phi = 1 - sum phi_n z^n,
/// Theta = 1 + sum theta_n z^n.
inline std::pair<LaurentPoly, LaurentPoly> arma_polys(const ModelSpec& model) {
    model.validate();
    LaurentPoly phi = LaurentPoly::constant(model.dim, 1.0);
    for (const auto& [n, c] : model.ar) phi.add(n, -c);
    LaurentPoly theta = LaurentPoly::constant(model.dim, 1.0);
    for (const auto& [n, c] : model.ma) theta.add(n, c);
    return {phi, theta};
}

namespace detail {

inline void parse_side(const nlohmann::json& j, const std::string& idx_key, const std::string& coeff_key, int dim,
                       std::map<MultiIndex, cdouble>& out) {
    if (!j.contains(idx_key) && !j.contains(coeff_key)) return;
    const auto& idx = j.at(idx_key);
    const auto& coeff = j.at(coeff_key);
    if (!idx.is_array() || !coeff.is_array() || idx.size() != coeff.size())
        throw std::invalid_argument("ModelSpec JSON: " + idx_key + " and " + coeff_key + " must be arrays of equal length");
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& n = idx[i];
        if (!n.is_array()) throw std::invalid_argument("ModelSpec JSON: indices must be integer arrays");
        if (static_cast<int>(n.size()) != dim) throw dimension_error("ModelSpec JSON: index dimension mismatch");
        std::vector<int> e;
        e.reserve(n.size());
        for (const auto& v : n) e.push_back(v.get<int>());
        const auto& c = coeff[i];
        if (!c.is_array() || c.size() != 2) throw std::invalid_argument("ModelSpec JSON: coefficients must be [re, im] pairs");
        out[MultiIndex(std::move(e))] = cdouble{c[0].get<double>(), c[1].get<double>()};
    }
}

}  // namespace detail

/// Schema: {"d": int, "R": [[int,...]], "phi": [[re,im],...],
///          "S": [[int,...]], "theta": [[re,im],...]}, positional R<->phi, S<->theta.
inline ModelSpec model_from_json(const nlohmann::json& j) {
    ModelSpec m;
    m.dim = j.at("d").get<int>();
    detail::parse_side(j, "R", "phi", m.dim, m.ar);
    detail::parse_side(j, "S", "theta", m.dim, m.ma);
    m.validate();
    return m;
}

inline nlohmann::json model_to_json(const ModelSpec& m) {
    nlohmann::json j;
    j["d"] = m.dim;
    auto dump_side = [](const std::map<MultiIndex, cdouble>& side, nlohmann::json& idx, nlohmann::json& coeff) {
        idx = nlohmann::json::array();
        coeff = nlohmann::json::array();
        for (const auto& [n, c] : side) {
            idx.push_back(n.entries());
            coeff.push_back({c.real(), c.imag()});
        }
    };
    dump_side(m.ar, j["R"], j["phi"]);
    dump_side(m.ma, j["S"], j["theta"]);
    return j;
}

}  // namespace sarma
