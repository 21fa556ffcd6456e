// sarma: spatial ARMA random-field toolkit.
//
// Subcommands: check | coeffs | simulate | delannoy | spectrum.
// Exit codes: 0 exists / success, 1 not-exists, 2 unknown,
//             64 malformed input, 65 dimension mismatch,
//             66 aliasing refusal, 67 truncation exceeds coefficient box,
//             70 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarma/delannoy.hpp"
#include "sarma/existence.hpp"
#include "sarma/io.hpp"
#include "sarma/model.hpp"
#include "sarma/noise.hpp"
#include "sarma/simulate.hpp"
#include "sarma/spectral.hpp"

namespace {

constexpr int kExitMalformed = 64;
constexpr int kExitDimension = 65;
constexpr int kExitAliasing = 66;
constexpr int kExitTruncation = 67;
constexpr int kExitInternal = 70;

struct exit_with_code {
    int code;
    std::string message;
};

sarma::ModelSpec load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw exit_with_code{kExitMalformed, "cannot open model file: " + path};
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw exit_with_code{kExitMalformed, std::string("malformed model JSON: ") + e.what()};
    }
    try {
        return sarma::model_from_json(j);
    } catch (const sarma::dimension_error& e) {
        throw exit_with_code{kExitDimension, e.what()};
    } catch (const std::exception& e) {
        throw exit_with_code{kExitMalformed, e.what()};
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

sarma::NoiseSpec parse_noise(const std::string& text) {
    try {
        return sarma::NoiseSpec::parse(text);
    } catch (const std::exception& e) {
        throw exit_with_code{kExitMalformed, e.what()};
    }
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        sarma::io::write_text_file(out_path, content);
}

// ---------------------------------------------------------------------------

struct CheckArgs {
    std::string model_path;
    std::string noise = "gaussian";
    std::string mode = "auto";
    std::string out;
    int levels = 0;
    int m0 = 0;
    int alpha_box = 0;
};

int run_check(const CheckArgs& a) {
    const sarma::ModelSpec model = load_model(a.model_path);
    sarma::NoiseSpec noise = parse_noise(a.noise);
    sarma::CheckOptions opt;
    opt.quadrature.levels = a.levels;
    opt.quadrature.base_resolution = a.m0;
    opt.alpha_box = a.alpha_box;

    std::string mode = a.mode;
    double p1 = 0, p2 = 0, p3 = 0;
    const bool first_order = model.first_order_params(p1, p2, p3);
    if (mode == "auto") mode = first_order ? "firstorder" : model.causal_mode() ? "causal" : "linear";

    sarma::ExistenceReport rep;
    if (mode == "firstorder") {
        if (!first_order) throw exit_with_code{kExitMalformed, "model is not of the first-order 2D shape"};
        rep = sarma::check_first_order_2d(p1, p2, p3, noise);
    } else if (mode == "causal") {
        rep = sarma::check_causal(model, noise, opt);
    } else if (mode == "linear") {
        rep = sarma::check_linear_stationary(model, noise, opt);
    } else {
        throw exit_with_code{kExitMalformed, "unknown mode: " + mode};
    }
    emit(a.out, sarma::report_to_json(rep).dump(2) + "\n");
    return rep.exit_code();
}

// ---------------------------------------------------------------------------

struct CoeffsArgs {
    std::string model_path;
    std::string method = "recursion";
    std::string out_dir = ".";
    int box = 16;
    int grid = 0;
};

int run_coeffs(const CoeffsArgs& a) {
    const sarma::ModelSpec model = load_model(a.model_path);
    if (a.box < 0) throw exit_with_code{kExitMalformed, "box must be nonnegative"};
    sarma::MultiIndex keep = sarma::MultiIndex::zero(model.dim);
    for (int i = 0; i < model.dim; ++i) keep[i] = a.box;

    sarma::CoefficientField coeffs(model.dim, sarma::SupportKind::FullLattice);
    if (a.method == "recursion") {
        if (!model.causal_mode()) throw exit_with_code{kExitInternal, "recursion method requires a causal-mode model"};
        coeffs = sarma::causal_alpha(model, keep);
    } else if (a.method == "delannoy") {
        double p1, p2, p3;
        if (!model.first_order_params(p1, p2, p3))
            throw exit_with_code{kExitInternal, "delannoy method is only valid for the first-order 2D model shape"};
        coeffs = sarma::delannoy_field({p1, p2, p3}, a.box);
    } else if (a.method == "fft") {
        int m = a.grid;
        if (m == 0) {
            m = 8;
            while (m < 4 * (2 * a.box + 1)) m <<= 1;
        }
        coeffs = sarma::fourier_psi(model, sarma::TorusGrid::uniform(model.dim, m), keep);
    } else {
        throw exit_with_code{kExitMalformed, "unknown method: " + a.method};
    }
    sarma::attach_decay_fit(coeffs);

    std::filesystem::create_directories(a.out_dir);
    std::ofstream csv(a.out_dir + "/coeffs.csv", std::ios::binary);
    sarma::io::write_coefficients_csv(csv, coeffs);
    nlohmann::json dj;
    dj["method"] = a.method;
    dj["box"] = a.box;
    dj["decay_fit"] = sarma::io::decay_to_json(coeffs.decay());
    sarma::io::write_text_file(a.out_dir + "/decay.json", dj.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model_path;
    std::string noise = "gaussian";
    std::string size = "64,64";
    std::string method = "auto";
    std::string out_dir = ".";
    std::string perturb_lambda;
    double perturb_u = 0.0;
    int trunc = 20;
    int coeff_box = 0;
    std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
    const sarma::ModelSpec model = load_model(a.model_path);
    const sarma::NoiseSpec noise = parse_noise(a.noise);
    const std::vector<int> extents = parse_int_list(a.size);
    if (static_cast<int>(extents.size()) != model.dim)
        throw exit_with_code{kExitDimension, "--size must list one extent per model dimension"};
    for (int e : extents)
        if (e < 1) throw exit_with_code{kExitMalformed, "--size extents must be positive"};
    if (a.trunc < 0) throw exit_with_code{kExitMalformed, "--trunc must be nonnegative"};
    const int coeff_box = a.coeff_box > 0 ? a.coeff_box : a.trunc;
    if (coeff_box < a.trunc)
        throw exit_with_code{kExitTruncation, "truncation exceeds the coefficient box"};

    std::string method = a.method;
    if (method == "auto") method = model.causal_mode() ? "recursion" : "fft";
    sarma::MultiIndex cbox = sarma::MultiIndex::zero(model.dim);
    for (int i = 0; i < model.dim; ++i) cbox[i] = coeff_box;
    sarma::CoefficientField coeffs(model.dim, sarma::SupportKind::FullLattice);
    if (method == "recursion") {
        if (!model.causal_mode()) throw exit_with_code{kExitInternal, "recursion method requires a causal-mode model"};
        coeffs = sarma::causal_alpha(model, cbox);
    } else if (method == "delannoy") {
        double p1, p2, p3;
        if (!model.first_order_params(p1, p2, p3))
            throw exit_with_code{kExitInternal, "delannoy method is only valid for the first-order 2D model shape"};
        coeffs = sarma::delannoy_field({p1, p2, p3}, coeff_box);
    } else if (method == "fft") {
        int m = 8;
        while (m < 4 * (2 * coeff_box + 1)) m <<= 1;
        coeffs = sarma::fourier_psi(model, sarma::TorusGrid::uniform(model.dim, m), cbox);
    } else {
        throw exit_with_code{kExitMalformed, "unknown method: " + method};
    }
    sarma::attach_decay_fit(coeffs);

    const sarma::LatticeWindow window = sarma::LatticeWindow::box(extents);
    sarma::MultiIndex trunc = sarma::MultiIndex::zero(model.dim);
    for (int i = 0; i < model.dim; ++i) trunc[i] = a.trunc;
    sarma::FieldSample y = sarma::linear_field(coeffs, noise, window, trunc, a.seed);
    const sarma::FieldSample z = sarma::sample_noise(noise, window, a.seed);
    nlohmann::json rj;
    rj["seed"] = a.seed;
    rj["noise"] = noise.name();
    rj["method"] = method;
    rj["truncation"] = a.trunc;

    if (!a.perturb_lambda.empty()) {
        const std::vector<double> lambda = parse_double_list(a.perturb_lambda);
        if (static_cast<int>(lambda.size()) != model.dim)
            throw exit_with_code{kExitDimension, "--perturb-lambda must list one angle per dimension"};
        const sarma::ResidualReport before = sarma::arma_residual(model, y, z);
        y = sarma::nonunique_perturbation(y, lambda, a.perturb_u);
        const sarma::ResidualReport after = sarma::arma_residual(model, y, z);
        double max_delta = 0.0;
        for (std::size_t i = 0; i < before.field.size(); ++i)
            max_delta = std::max(max_delta, std::abs(after.field[i] - before.field[i]));
        rj["perturbation"] = {{"lambda", lambda}, {"u", a.perturb_u}, {"residual_delta_max", max_delta}};
    }

    const sarma::ResidualReport res = sarma::arma_residual(model, y, z);
    rj["residual_max"] = res.max_abs;
    rj["interior_lower"] = res.interior.lower.entries();
    rj["interior_upper"] = res.interior.upper.entries();

    if (coeffs.support_kind() == sarma::SupportKind::CausalOrthant) {
        sarma::MultiIndex kzero = sarma::MultiIndex::zero(model.dim);
        const sarma::LatticeWindow dilated = window.dilated(kzero, trunc);
        const sarma::FieldSample zd = sarma::sample_noise(noise, dilated, a.seed);
        double z_sup = 0.0;
        for (const auto& v : zd.values) z_sup = std::max(z_sup, std::abs(v));
        rj["tail_bound"] = sarma::residual_tail_bound(model, coeffs, trunc, z_sup);
        rj["tail_bound_kind"] = "triangle inequality over the halo coefficients, a.s. on the window";
        // distance to the untruncated field, measured in mean square only: the
        // coefficient mass between the box and its doubling times E|Z|^2
        if (method == "recursion" && std::isfinite(noise.second_moment()) && 2 * coeff_box <= 512) {
            sarma::MultiIndex cbox2 = sarma::MultiIndex::zero(model.dim);
            for (int i = 0; i < model.dim; ++i) cbox2[i] = 2 * coeff_box;
            const sarma::CoefficientField wide = sarma::causal_alpha(model, cbox2);
            double inner = 0.0, outer = 0.0;
            coeffs.for_each([&](const sarma::MultiIndex&, sarma::cdouble v) { inner += std::norm(v); });
            wide.for_each([&](const sarma::MultiIndex&, sarma::cdouble v) { outer += std::norm(v); });
            rj["truncation_tail_mse"] = (outer - inner) * noise.second_moment();
            rj["truncation_tail_kind"] = "mean-square, not a.s.: coefficient mass between the box and its doubling";
        }
    } else {
        rj["tail_bound_kind"] = "none: full-lattice coefficients carry no a.s. halo bound here";
    }
    rj["decay_fit"] = sarma::io::decay_to_json(coeffs.decay());

    std::filesystem::create_directories(a.out_dir);
    {
        std::ofstream csv(a.out_dir + "/field.csv", std::ios::binary);
        sarma::io::write_field_csv(csv, y);
    }
    if (model.dim == 2) {
        std::ofstream pgm(a.out_dir + "/field.pgm", std::ios::binary);
        sarma::io::write_field_pgm(pgm, y);
    }
    sarma::io::write_text_file(a.out_dir + "/residual.json", rj.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct DelannoyArgs {
    double phi1 = 0.5, phi2 = 0.3, phi3 = 0.1;
    int n = 10, k = 10;
    bool identity = false;
    int beta_max = 6;
    int k_max = 20;
    std::string out;
};

int run_delannoy(const DelannoyArgs& a) {
    const sarma::DelannoyParams p{a.phi1, a.phi2, a.phi3};
    std::ostringstream os;
    if (a.identity) {
        if (a.phi3 == 0.0) throw exit_with_code{kExitMalformed, "--identity requires phi3 != 0"};
        nlohmann::json rows = nlohmann::json::array();
        for (int beta = 0; beta <= a.beta_max; ++beta)
            for (int k = 0; k <= a.k_max; ++k) {
                const auto r = sarma::jacobi_delannoy_identity(p, beta, k);
                rows.push_back({{"beta", beta}, {"k", k}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"abs_diff", r.abs_diff}});
            }
        nlohmann::json j;
        j["phi"] = {a.phi1, a.phi2, a.phi3};
        j["rows"] = rows;
        os << j.dump(2) << "\n";
    } else {
        const auto table = sarma::delannoy_table(p, a.n, a.k);
        for (int i = 0; i <= a.n; ++i) {
            for (int j = 0; j <= a.k; ++j) {
                if (j) os << ',';
                os << sarma::io::fmt17(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            }
            os << '\n';
        }
    }
    emit(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
    std::string model_path;
    std::string out;
    int levels = 0;
    int m0 = 0;
};

int run_spectrum(const SpectrumArgs& a) {
    const sarma::ModelSpec model = load_model(a.model_path);
    const int levels = a.levels > 0 ? a.levels : (model.dim <= 3 ? 4 : 3);
    const sarma::SpectralClassification c = sarma::l2_spectral_sequence(model, levels, a.m0);
    emit(a.out, sarma::io::classification_to_json(c).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial ARMA random-field toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    CheckArgs check;
    auto* c = app.add_subcommand("check", "existence checks for stationary solutions");
    c->add_option("--model", check.model_path, "model JSON path")->required();
    c->add_option("--noise", check.noise, "noise spec, e.g. gaussian, logpareto:1.5:sym");
    c->add_option("--mode", check.mode, "auto | linear | causal | firstorder");
    c->add_option("--levels", check.levels, "quadrature refinement levels");
    c->add_option("--m0", check.m0, "base resolution per axis");
    c->add_option("--alpha-box", check.alpha_box, "causal recursion box per axis");
    c->add_option("--out", check.out, "write the JSON report here instead of stdout");

    CoeffsArgs coeffs;
    auto* k = app.add_subcommand("coeffs", "solution coefficient export");
    k->add_option("--model", coeffs.model_path, "model JSON path")->required();
    k->add_option("--method", coeffs.method, "fft | recursion | delannoy");
    k->add_option("--box", coeffs.box, "kept box per axis");
    k->add_option("--grid", coeffs.grid, "transform grid per axis (fft method)");
    k->add_option("--out", coeffs.out_dir, "output directory");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate a truncated solution field");
    s->add_option("--model", sim.model_path, "model JSON path")->required();
    s->add_option("--noise", sim.noise, "noise spec");
    s->add_option("--size", sim.size, "window extents, comma separated");
    s->add_option("--trunc", sim.trunc, "truncation box per axis");
    s->add_option("--coeff-box", sim.coeff_box, "coefficient box per axis (default: trunc)");
    s->add_option("--seed", sim.seed, "64-bit seed");
    s->add_option("--method", sim.method, "auto | fft | recursion | delannoy");
    s->add_option("--perturb-lambda", sim.perturb_lambda, "oscillation frequencies, comma separated");
    s->add_option("--perturb-u", sim.perturb_u, "uniform phase in [0,1)");
    s->add_option("--out", sim.out_dir, "output directory");

    DelannoyArgs del;
    auto* d = app.add_subcommand("delannoy", "weighted Delannoy tables and the Jacobi identity");
    d->add_option("--phi1", del.phi1, "step weight (1,0)");
    d->add_option("--phi2", del.phi2, "step weight (0,1)");
    d->add_option("--phi3", del.phi3, "step weight (1,1)");
    d->add_option("--n", del.n, "max row index");
    d->add_option("--k", del.k, "max column index");
    d->add_flag("--identity", del.identity, "emit the Jacobi comparison table as JSON");
    d->add_option("--beta-max", del.beta_max, "identity: max beta");
    d->add_option("--k-max", del.k_max, "identity: max k");
    d->add_option("--out", del.out, "write output here instead of stdout");

    SpectrumArgs spec;
    auto* q = app.add_subcommand("spectrum", "torus quadrature of |Theta/Phi|^2");
    q->add_option("--model", spec.model_path, "model JSON path")->required();
    q->add_option("--levels", spec.levels, "refinement levels");
    q->add_option("--m0", spec.m0, "base resolution per axis");
    q->add_option("--out", spec.out, "write the JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitMalformed;
    }

    try {
        if (*c) return run_check(check);
        if (*k) return run_coeffs(coeffs);
        if (*s) return run_simulate(sim);
        if (*d) return run_delannoy(del);
        if (*q) return run_spectrum(spec);
    } catch (const exit_with_code& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const sarma::aliasing_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAliasing;
    } catch (const sarma::dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDimension;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
