#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sarma/existence.hpp"
#include "sarma/simulate.hpp"
#include "sarma/spectral.hpp"

namespace sarma::io {

/// 17 significant digits: enough to round-trip a double, so cross-run diffs
/// compare values, not formatting noise.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV rows "k_1,...,k_d,re,im" in lexicographic index order.
inline void write_coefficients_csv(std::ostream& os, const CoefficientField& c) {
    c.for_each([&](const MultiIndex& k, cdouble v) {
        for (int i = 0; i < k.dim(); ++i) os << k[i] << ',';
        os << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
    });
}

/// CSV rows "t_1,...,t_d,re,im" over the sample window.
inline void write_field_csv(std::ostream& os, const FieldSample& f) {
    for (std::int64_t i = 0; i < f.window.size(); ++i) {
        const MultiIndex t = f.window.site_at(i);
        for (int a = 0; a < t.dim(); ++a) os << t[a] << ',';
        const cdouble v = f.values[static_cast<std::size_t>(i)];
        os << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
    }
}

/// Binary 8-bit PGM magnitude heatmap, row-major, value = clamp(255 |Y| / max |Y|).
inline void write_field_pgm(std::ostream& os, const FieldSample& f) {
    if (f.window.dim() != 2) throw std::invalid_argument("write_field_pgm: only 2-dimensional windows");
    const auto ext = f.window.extents();
    double max_abs = 0.0;
    for (const auto& v : f.values) max_abs = std::max(max_abs, std::abs(v));
    os << "P5\n" << ext[1] << ' ' << ext[0] << "\n255\n";
    for (const auto& v : f.values) {
        long g = max_abs > 0.0 ? std::lround(255.0 * std::abs(v) / max_abs) : 0;
        g = std::min(255l, std::max(0l, g));
        os.put(static_cast<char>(static_cast<unsigned char>(g)));
    }
}

inline nlohmann::json classification_to_json(const SpectralClassification& c) {
    nlohmann::json j;
    j["verdict"] = to_string(c.verdict);
    j["estimates"] = c.estimates;
    j["ratios"] = c.ratios;
    j["increments"] = c.increments;
    j["resolutions"] = c.resolutions;
    j["skip_fraction"] = c.skip_fraction;
    if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
    if (c.verdict == Verdict::Finite) j["value"] = c.value;
    return j;
}

inline nlohmann::json three_series_to_json(const ThreeSeriesReport& r) {
    auto series = [](const SeriesDiagnostic& s) {
        nlohmann::json j;
        j["verdict"] = to_string(s.verdict);
        j["box_sum"] = s.box_sum;
        j["tail_estimate"] = s.tail_estimate;
        j["tail_converged"] = s.tail_converged;
        j["shell_partials"] = s.shell_partials;
        return j;
    };
    nlohmann::json j;
    j["series_a"] = series(r.series_a);
    j["series_c"] = series(r.series_c);
    j["overall"] = to_string(r.overall);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline nlohmann::json rectangular_to_json(const RectangularReport& r) {
    nlohmann::json j;
    j["max_spread"] = r.max_spread;
    j["paths"] = nlohmann::json::array();
    for (const auto& trace : r.traces) {
        nlohmann::json p;
        p["boxes"] = nlohmann::json::array();
        p["sums"] = nlohmann::json::array();
        for (const auto& b : trace.boxes) p["boxes"].push_back(b.entries());
        for (const auto& s : trace.sums) p["sums"].push_back({s.real(), s.imag()});
        j["paths"].push_back(std::move(p));
    }
    return j;
}

inline nlohmann::json decay_to_json(const std::optional<DecayFit>& fit) {
    nlohmann::json j;
    if (fit) {
        j["amplitude"] = fit->amplitude;
        j["rate"] = std::isinf(fit->rate) ? nlohmann::json("infinity") : nlohmann::json(fit->rate);
    } else {
        j = nullptr;
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
}

}  // namespace sarma::io
