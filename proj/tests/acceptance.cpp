// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "sarma/bilinear.hpp"
#include "sarma/delannoy.hpp"
#include "sarma/existence.hpp"
#include "sarma/simulate.hpp"
#include "sarma/spectral.hpp"

using namespace sarma;
namespace fs = std::filesystem;
using steady = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed(steady::time_point t0) { return std::chrono::duration<double>(steady::now() - t0).count(); }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// 1. recursion == closed form a == closed form b, rel 1e-10, n,k <= 30, 50 triples
void criterion1() {
    const auto t0 = steady::now();
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const DelannoyParams p{u(gen), u(gen), u(gen)};
        const DelannoyParams abs_a{std::abs(p.phi1), std::abs(p.phi2), std::abs(p.phi3)};
        const DelannoyParams abs_b{std::abs(p.phi1), std::abs(p.phi2),
                                   std::abs(p.phi1 * p.phi2 + p.phi3) - std::abs(p.phi1) * std::abs(p.phi2)};
        const auto table = delannoy_table(p, 30, 30);
        for (int n = 0; n <= 30; ++n)
            for (int k = 0; k <= 30; ++k) {
                const double r = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
                const double scale = std::max({1.0, delannoy_closed_a(abs_a, n, k), delannoy_closed_b(abs_b, n, k)});
                worst = std::max(worst, std::abs(delannoy_closed_a(p, n, k) - r) / scale);
                worst = std::max(worst, std::abs(delannoy_closed_b(p, n, k) - r) / scale);
            }
    }
    const double dt = elapsed(t0);
    report(1, "Delannoy three-way equivalence", worst <= 1e-10 && dt < 5.0,
           fmt("worst rel %.3g, %.2fs", worst, dt));
}

// 2. |lhs - rhs| <= 1e-8 for beta <= 10, k <= 40, 20 zero-free triples with |phi3| >= 0.05
void criterion2() {
    const auto t0 = steady::now();
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    int triples = 0;
    while (triples < 20) {
        const DelannoyParams p{u(gen), u(gen), u(gen)};
        if (std::abs(p.phi3) < 0.05) continue;
        if (!bidisc_zero_free_bilinear(p.phi1, p.phi2, p.phi3).zero_free) continue;
        ++triples;
        for (int beta = 0; beta <= 10; ++beta)
            for (int k = 0; k <= 40; ++k) worst = std::max(worst, jacobi_delannoy_identity(p, beta, k).abs_diff);
    }
    const double dt = elapsed(t0);
    report(2, "Jacobi identity", worst <= 1e-8 && dt < 5.0, fmt("worst abs %.3g, %.2fs", worst, dt));
}

// 3. fourier_psi vs causal_alpha, 16x16 box, grid 256^2, 20 zero-free causal models, 1e-8
void criterion3() {
    const auto t0 = steady::now();
    std::mt19937_64 gen(303);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> nterms(1, 3), expo(0, 2);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        ModelSpec m;
        m.dim = 2;
        const int terms = nterms(gen);
        for (int t = 0; t < terms; ++t) {
            MultiIndex n{expo(gen), expo(gen)};
            if (n.is_zero()) n = MultiIndex{1, 0};
            m.ar[n] = u(gen) * 0.6 / terms;
        }
        const int mterms = nterms(gen) - 1;
        for (int t = 0; t < mterms; ++t) {
            MultiIndex n{expo(gen), expo(gen)};
            if (n.is_zero()) n = MultiIndex{0, 1};
            m.ma[n] = 0.4 * u(gen);
        }
        const CoefficientField psi = fourier_psi(m, TorusGrid::uniform(2, 256), MultiIndex{15, 15});
        const CoefficientField alpha = causal_alpha(m, MultiIndex{15, 15});
        for (int a = 0; a <= 15; ++a)
            for (int b = 0; b <= 15; ++b)
                worst = std::max(worst, std::abs(psi.at(MultiIndex{a, b}) - alpha.at(MultiIndex{a, b})));
    }
    const double dt = elapsed(t0);
    report(3, "coefficient oracle equivalence", worst <= 1e-8 && dt < 30.0,
           fmt("worst abs %.3g, %.2fs", worst, dt));
}

// 4. Finite for the d=5 model (two refinements from 16^5), divergent for the 2D AR model
void criterion4() {
    const auto t0 = steady::now();
    ModelSpec d5;
    d5.dim = 5;
    for (int i = 0; i < 5; ++i) {
        std::vector<int> e(5, 0);
        e[static_cast<std::size_t>(i)] = 1;
        d5.ar[MultiIndex(e)] = 0.2;
    }
    const SpectralClassification fine = l2_spectral_sequence(d5, 3, 16);

    ModelSpec half;
    half.dim = 2;
    half.ar[MultiIndex{1, 0}] = 0.5;
    half.ar[MultiIndex{0, 1}] = 0.5;
    const SpectralClassification div = l2_spectral_sequence(half, 4, 32);
    const double dt = elapsed(t0);
    report(4, "finite d=5 vs divergent d=2 separation",
           fine.verdict == Verdict::Finite && div.verdict == Verdict::Divergent && dt < 60.0,
           fmt("d5 %s, d2 %s, %.2fs", to_string(fine.verdict), to_string(div.verdict), dt));
}

// 5. bounded ARMA quotient: every refinement estimate <= 4 + 1e-6
void criterion5() {
    ModelSpec arma;
    arma.dim = 2;
    arma.ar[MultiIndex{1, 0}] = 0.5;
    arma.ar[MultiIndex{0, 1}] = 0.5;
    arma.ma[MultiIndex{1, 0}] = -1.0;
    arma.ma[MultiIndex{0, 1}] = -1.0;
    arma.ma[MultiIndex{1, 1}] = 1.0;
    const SpectralClassification c = l2_spectral_sequence(arma, 4, 32);
    double max_e = 0.0;
    for (double e : c.estimates) max_e = std::max(max_e, e);
    report(5, "bounded ARMA quadrature stays under 4", max_e <= 4.0 + 1e-6 && c.verdict == Verdict::Finite,
           fmt("max estimate %.9g, verdict %s", max_e, to_string(c.verdict)));
}

// 6. totality + swap symmetry + triangle inequality over 1000 draws x 4 noises
void criterion6() {
    const auto t0 = steady::now();
    std::mt19937_64 gen(606);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<NoiseSpec> catalog = {NoiseSpec::gaussian(), NoiseSpec::two_point(), NoiseSpec::cauchy(),
                                            NoiseSpec::log_pareto(1.5, true)};
    bool ok = true;
    std::string why = "all verdicts total";
    for (int rep = 0; rep < 1000 && ok; ++rep) {
        double a = u(gen), b = u(gen), c = u(gen);
        if (a == 0.0 && b == 0.0 && c == 0.0) a = 0.1;
        for (const NoiseSpec& noise : catalog) {
            const ExistenceReport r = check_first_order_2d(a, b, c, noise, 4);
            if (r.verdict == ExistenceVerdict::Unknown) {
                ok = false;
                why = fmt("unknown verdict at (%.3f,%.3f,%.3f)", a, b, c);
                break;
            }
        }
        const BilinearBidiscResult r1 = bidisc_zero_free_bilinear(a, b, c);
        const BilinearBidiscResult r2 = bidisc_zero_free_bilinear(b, a, c);
        if (r1.zero_free != r2.zero_free || (r1.zero_free && r1.min_modulus != r2.min_modulus)) {
            ok = false;
            why = fmt("swap asymmetry at (%.3f,%.3f,%.3f)", a, b, c);
        }
        if (std::abs(a) + std::abs(b) + std::abs(c) < 1.0 && !r1.zero_free) {
            ok = false;
            why = fmt("triangle violation at (%.3f,%.3f,%.3f)", a, b, c);
        }
    }
    const double dt = elapsed(t0);
    report(6, "first-order characterization totality", ok && dt < 10.0, fmt("%s, %.2fs", why.c_str(), dt));
}

// 7. residual decay by >= 10x per doubling, always under the computed bound
void criterion7() {
    const auto t0 = steady::now();
    const ModelSpec m = ModelSpec::first_order(0.2, 0.2, 0.1);
    const NoiseSpec g = NoiseSpec::gaussian();
    const LatticeWindow win = LatticeWindow::box({64, 64});
    bool ok = true;
    std::string detail;
    double prev = HUGE_VAL;
    for (int n : {10, 20, 40}) {
        const MultiIndex trunc{n, n};
        const CoefficientField alpha = causal_alpha(m, trunc);
        const FieldSample y = linear_field(alpha, g, win, trunc, 1234);
        const FieldSample z = sample_noise(g, win, 1234);
        const ResidualReport r = arma_residual(m, y, z);
        const LatticeWindow dil = win.dilated(MultiIndex::zero(2), trunc);
        const FieldSample zd = sample_noise(g, dil, 1234);
        double z_sup = 0.0;
        for (const auto& v : zd.values) z_sup = std::max(z_sup, std::abs(v));
        const double bound = residual_tail_bound(m, alpha, trunc, z_sup);
        if (r.max_abs > bound) ok = false;
        if (prev != HUGE_VAL && r.max_abs > prev / 10.0) ok = false;
        detail += fmt("N=%d res %.3g bound %.3g; ", n, r.max_abs, bound);
        prev = r.max_abs;
    }
    const double dt = elapsed(t0);
    report(7, "residual decay under the tail bound", ok && dt < 20.0, detail + fmt("%.2fs", dt));
}

// 8. perturbation with a torus zero is residual-invariant; off-zero shifts by |Phi(e^{-il})|
void criterion8() {
    ModelSpec arma;
    arma.dim = 2;
    arma.ar[MultiIndex{1, 0}] = 0.5;
    arma.ar[MultiIndex{0, 1}] = 0.5;
    arma.ma[MultiIndex{1, 0}] = -1.0;
    arma.ma[MultiIndex{0, 1}] = -1.0;
    arma.ma[MultiIndex{1, 1}] = 1.0;
    const NoiseSpec g = NoiseSpec::gaussian();
    const LatticeWindow win = LatticeWindow::box({48, 48});
    const MultiIndex trunc{30, 30};
    const CoefficientField alpha = causal_alpha(arma, trunc);
    const FieldSample y = linear_field(alpha, g, win, trunc, 77);
    const FieldSample z = sample_noise(g, win, 77);
    const ResidualReport base = arma_residual(arma, y, z);

    const ResidualReport same = arma_residual(arma, nonunique_perturbation(y, {0.0, 0.0}, 0.25), z);
    double zero_delta = 0.0;
    for (std::size_t i = 0; i < base.field.size(); ++i)
        zero_delta = std::max(zero_delta, std::abs(same.field[i] - base.field[i]));

    const double s = 2.0 * std::asin(0.15);  // |Phi(e^{-i(s,s)})| = 2 sin(s/2) = 0.3
    const ResidualReport moved = arma_residual(arma, nonunique_perturbation(y, {s, s}, 0.7), z);
    double lo = HUGE_VAL, hi = 0.0;
    for (std::size_t i = 0; i < base.field.size(); ++i) {
        const double d = std::abs(moved.field[i] - base.field[i]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const bool ok = zero_delta <= 1e-10 && lo >= 0.3 - 1e-9 && hi <= 0.3 + 1e-9;
    report(8, "nonuniqueness perturbation", ok,
           fmt("zero-frequency delta %.3g, off-zero delta in [%.12g, %.12g]", zero_delta, lo, hi));
}

// 9. counting function lower bound f(x)/log^2 x >= 0.05 on three parameter regimes
void criterion9() {
    const auto t0 = steady::now();
    const std::vector<DelannoyParams> cases = {{0.0, 0.5, 0.25}, {0.5, 0.3, 0.1}, {0.5, 0.5, -0.5}};
    bool ok = true;
    double worst = HUGE_VAL;
    for (const auto& p : cases)
        for (double x : {10.0, 1e2, 1e3, 1e4, 1e5, 1e6}) {
            const double f = static_cast<double>(counting_function(p, x, 128));
            const double ratio = f / (std::log(x) * std::log(x));
            worst = std::min(worst, ratio);
            if (ratio < 0.05) ok = false;
        }
    const double dt = elapsed(t0);
    report(9, "counting-function lower bound", ok && dt < 30.0, fmt("min ratio %.4g, %.2fs", worst, dt));
}

// 10. the rectangular-convergence counterexample
void criterion10() {
    CoefficientField x(2, SupportKind::CausalOrthant);
    const int reach = 4096;
    for (int i = 1; i <= reach; ++i) {
        x.set(MultiIndex{i, 1}, -static_cast<double>(i));
        x.set(MultiIndex{i, 2}, static_cast<double>(i));
    }
    std::vector<MultiIndex> square, row;
    for (int n = 2; n <= 16; ++n) square.push_back(MultiIndex{n, n});
    for (int n = 16; n <= reach; n *= 2) row.push_back(MultiIndex{n, 1});
    const RectangularReport rep =
        rectangular_partial_sums_paths(x, NoiseSpec::deterministic(1.0), MultiIndex{0, 0}, {square, row}, 1);
    bool squares_zero = true;
    for (const auto& s : rep.traces[0].sums) squares_zero &= (s == cdouble{0.0, 0.0});
    const double row_final = std::abs(rep.traces[1].sums.back());
    const bool ok = squares_zero && row_final > 1e6;
    report(10, "rectangular-convergence counterexample", ok,
           fmt("square sums %s, row-biased final %.4g", squares_zero ? "exactly zero" : "NONZERO", row_final));
}

// 11. byte-identical CLI outputs across reruns and worker counts
void criterion11() {
    const fs::path dir = fs::temp_directory_path() / "sarma_acceptance";
    fs::create_directories(dir);
    const fs::path model = dir / "fo.json";
    {
        std::ofstream os(model);
        os << R"({"d":2,"R":[[1,0],[0,1],[1,1]],"phi":[[0.2,0],[0.2,0],[0.1,0]],"S":[],"theta":[]})";
    }
    const std::string cli = SARMA_CLI_PATH;
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    auto run_to = [&](const std::string& args, const std::string& threads, const fs::path& stdout_file) {
        const std::string cmd = "SPATIAL_ARMA_THREADS=" + threads + " " + cli + " " + args + " > " +
                                stdout_file.string() + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"check", "check --model " + model.string() + " --noise gaussian"},
        {"coeffs", "coeffs --model " + model.string() + " --method recursion --box 8 --out OUTDIR"},
        {"simulate", "simulate --model " + model.string() + " --noise gaussian --size 24,24 --trunc 10 --seed 3 --out OUTDIR"},
        {"delannoy", "delannoy --phi1 0.2 --phi2 0.2 --phi3 0.1 --n 8 --k 8"},
        {"spectrum", "spectrum --model " + model.string() + " --levels 3 --m0 32"},
    };
    bool ok = true;
    std::string why = "all subcommands byte-identical";
    for (const auto& [name, tmpl] : commands) {
        std::vector<std::string> blobs;
        int run_id = 0;
        for (const char* threads : {"1", "4"}) {
            for (int rep = 0; rep < 2; ++rep, ++run_id) {
                const fs::path outdir = dir / (name + "_" + std::to_string(run_id));
                fs::create_directories(outdir);
                std::string args = tmpl;
                const auto pos = args.find("OUTDIR");
                if (pos != std::string::npos) args.replace(pos, 6, outdir.string());
                const fs::path out_txt = dir / (name + "_" + std::to_string(run_id) + ".stdout");
                const int rc = run_to(args, threads, out_txt);
                std::string blob = fmt("exit=%d\n", rc) + slurp(out_txt);
                if (fs::exists(outdir)) {
                    std::vector<fs::path> files;
                    for (const auto& e : fs::directory_iterator(outdir)) files.push_back(e.path());
                    std::sort(files.begin(), files.end());
                    for (const auto& f : files) blob += slurp(f);
                }
                blobs.push_back(std::move(blob));
            }
        }
        for (std::size_t i = 1; i < blobs.size(); ++i)
            if (blobs[i] != blobs[0]) {
                ok = false;
                why = name + " output differs across runs";
            }
    }
    report(11, "CLI determinism", ok, why);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
