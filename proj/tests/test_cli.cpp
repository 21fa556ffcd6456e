#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = SARMA_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("sarma_cli_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd = env + " " + kCli + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(out);
    std::stringstream ss;
    ss << is.rdbuf();
    r.stdout_text = ss.str();
    fs::remove(out);
    return r;
}

fs::path fixture_dir() {
    const fs::path dir = fs::temp_directory_path() / "sarma_cli_fixtures";
    fs::create_directories(dir);
    return dir;
}

std::string write_model(const std::string& name, const std::string& json) {
    const fs::path p = fixture_dir() / name;
    std::ofstream os(p);
    os << json;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("check exit codes follow the verdicts") {
    const std::string fo = write_model("fo.json",
                                       R"({"d":2,"R":[[1,0],[0,1],[1,1]],"phi":[[0.2,0],[0.2,0],[0.1,0]],"S":[],"theta":[]})");
    CHECK(run("check --model " + fo + " --noise gaussian").exit_code == 0);
    CHECK(run("check --model " + fo + " --noise logpareto:1.5:sym").exit_code == 1);

    const std::string half =
        write_model("half.json", R"({"d":2,"R":[[1,0],[0,1]],"phi":[[0.5,0],[0.5,0]],"S":[],"theta":[]})");
    CHECK(run("check --model " + half + " --noise gaussian").exit_code == 1);

    // torus zero covered by the MA side, noise without variance: unknown
    const std::string arma = write_model(
        "arma.json",
        R"({"d":2,"R":[[1,0],[0,1]],"phi":[[0.5,0],[0.5,0]],"S":[[1,0],[0,1],[1,1]],"theta":[[-1,0],[-1,0],[1,0]]})");
    CHECK(run("check --model " + arma + " --noise cauchy --mode causal").exit_code == 2);

    // trivial model: exists, solution Y = Z
    const std::string trivial = write_model("trivial.json", R"({"d":2,"R":[],"phi":[],"S":[],"theta":[]})");
    const RunResult r = run("check --model " + trivial + " --noise gaussian --mode causal");
    CHECK(r.exit_code == 0);
}

TEST_CASE("malformed inputs use the reserved exit codes") {
    const std::string broken = write_model("broken.json", "{nope");
    CHECK(run("check --model " + broken).exit_code == 64);
    const std::string mismatched =
        write_model("mismatch.json", R"({"d":2,"R":[[1,0,0]],"phi":[[0.5,0]],"S":[],"theta":[]})");
    CHECK(run("check --model " + mismatched).exit_code == 65);
    CHECK(run("check --model /nonexistent/model.json").exit_code == 64);
    CHECK(run("check --noise gaussian").exit_code == 64);           // missing required flag
    CHECK(run("check --model " + broken + " --bogus 1").exit_code == 64);
    const std::string ok_model =
        write_model("ok.json", R"({"d":2,"R":[[1,0]],"phi":[[0.25,0]],"S":[],"theta":[]})");
    CHECK(run("check --model " + ok_model + " --noise levy").exit_code == 64);  // unknown noise family
    CHECK(run("simulate --model " + ok_model + " --size 0,8").exit_code == 64);
}

TEST_CASE("coeffs refuses transform extraction across a torus zero") {
    const std::string half =
        write_model("half2.json", R"({"d":2,"R":[[1,0],[0,1]],"phi":[[0.5,0],[0.5,0]],"S":[],"theta":[]})");
    const fs::path out = fixture_dir() / "co1";
    CHECK(run("coeffs --model " + half + " --method fft --box 8 --out " + out.string()).exit_code == 66);
}

TEST_CASE("coeffs delannoy and recursion methods agree") {
    const std::string fo = write_model("fo2.json",
                                       R"({"d":2,"R":[[1,0],[0,1],[1,1]],"phi":[[0.2,0],[0.2,0],[0.1,0]],"S":[],"theta":[]})");
    const fs::path out_a = fixture_dir() / "del";
    const fs::path out_b = fixture_dir() / "rec";
    CHECK(run("coeffs --model " + fo + " --method delannoy --box 10 --out " + out_a.string()).exit_code == 0);
    CHECK(run("coeffs --model " + fo + " --method recursion --box 10 --out " + out_b.string()).exit_code == 0);
    std::ifstream ca(out_a / "coeffs.csv"), cb(out_b / "coeffs.csv");
    std::string la, lb;
    int rows = 0;
    while (std::getline(ca, la) && std::getline(cb, lb)) {
        ++rows;
        // same index prefix, values within 1e-8
        const auto cut = [](const std::string& s) { return s.substr(0, s.find_last_of(',')); };
        const auto idx = [](const std::string& s) { return s.substr(0, s.find(',', s.find(',') + 1)); };
        CHECK(idx(la) == idx(lb));
        const double va = std::stod(cut(la).substr(cut(la).find_last_of(',') + 1));
        const double vb = std::stod(cut(lb).substr(cut(lb).find_last_of(',') + 1));
        CHECK(std::abs(va - vb) <= 1e-8);
    }
    CHECK(rows == 121);
    // the recursion method refuses non-causal models
    const std::string acausal =
        write_model("acausal.json", R"({"d":2,"R":[[-1,0]],"phi":[[0.25,0]],"S":[],"theta":[]})");
    CHECK(run("coeffs --model " + acausal + " --method recursion --box 4").exit_code == 70);
    // trivial model: a single unit coefficient at the origin
    const std::string trivial = write_model("trivial2.json", R"({"d":2,"R":[],"phi":[],"S":[],"theta":[]})");
    const fs::path out_t = fixture_dir() / "triv";
    CHECK(run("coeffs --model " + trivial + " --method recursion --box 0 --out " + out_t.string()).exit_code == 0);
    CHECK(slurp(out_t / "coeffs.csv") == "0,0,1,0\n");
}

TEST_CASE("simulate writes the three artifacts and honors the truncation guard") {
    const std::string fo = write_model("fo3.json",
                                       R"({"d":2,"R":[[1,0],[0,1],[1,1]],"phi":[[0.2,0],[0.2,0],[0.1,0]],"S":[],"theta":[]})");
    const fs::path out = fixture_dir() / "sim";
    const RunResult r =
        run("simulate --model " + fo + " --noise gaussian --size 32,32 --trunc 12 --seed 5 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "field.csv"));
    CHECK(fs::exists(out / "field.pgm"));
    CHECK(fs::exists(out / "residual.json"));
    const std::string pgm = slurp(out / "field.pgm");
    CHECK(pgm.substr(0, 3) == "P5\n");

    CHECK(run("simulate --model " + fo + " --trunc 12 --coeff-box 6 --out " + out.string()).exit_code == 67);
    CHECK(run("simulate --model " + fo + " --size 32,32,32 --out " + out.string()).exit_code == 65);

    // zero noise: the field and its residual vanish identically
    const fs::path out0 = fixture_dir() / "sim0";
    CHECK(run("simulate --model " + fo + " --noise deterministic:0 --size 16,16 --trunc 8 --out " + out0.string())
              .exit_code == 0);
    const std::string rj = slurp(out0 / "residual.json");
    CHECK(rj.find("\"residual_max\": 0.0") != std::string::npos);
}

TEST_CASE("simulate perturbation reporting") {
    const std::string arma = write_model(
        "arma2.json",
        R"({"d":2,"R":[[1,0],[0,1]],"phi":[[0.5,0],[0.5,0]],"S":[[1,0],[0,1],[1,1]],"theta":[[-1,0],[-1,0],[1,0]]})");
    const fs::path out = fixture_dir() / "simp";
    const RunResult r = run("simulate --model " + arma +
                            " --noise gaussian --size 24,24 --trunc 16 --seed 3 --perturb-lambda 0,0 --perturb-u 0.25 --out " +
                            out.string());
    CHECK(r.exit_code == 0);
    const std::string rj = slurp(out / "residual.json");
    const auto pos = rj.find("residual_delta_max");
    REQUIRE(pos != std::string::npos);
    const double delta = std::stod(rj.substr(rj.find(':', pos) + 1));
    CHECK(delta <= 1e-10);
}

TEST_CASE("delannoy subcommand emits tables and the identity comparison") {
    const RunResult table = run("delannoy --phi1 1 --phi2 1 --phi3 1 --n 3 --k 3");
    CHECK(table.exit_code == 0);
    std::istringstream is(table.stdout_text);
    std::string line;
    std::getline(is, line);
    CHECK(line == "1,1,1,1");
    std::getline(is, line);
    CHECK(line.substr(0, 4) == "1,3,");

    const RunResult ident = run("delannoy --phi1 0.5 --phi2 0.3 --phi3 0.1 --identity --beta-max 2 --k-max 5");
    CHECK(ident.exit_code == 0);
    CHECK(ident.stdout_text.find("\"rows\"") != std::string::npos);
    CHECK(run("delannoy --phi1 0.5 --phi2 0.3 --phi3 0 --identity").exit_code == 64);
}

TEST_CASE("spectrum subcommand classifies the anchor models") {
    const std::string half =
        write_model("half3.json", R"({"d":2,"R":[[1,0],[0,1]],"phi":[[0.5,0],[0.5,0]],"S":[],"theta":[]})");
    const RunResult r = run("spectrum --model " + half + " --levels 4 --m0 32");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"divergent\"") != std::string::npos);
}

TEST_CASE("subcommand outputs are byte-identical across reruns and worker counts") {
    const std::string fo = write_model("fo4.json",
                                       R"({"d":2,"R":[[1,0],[0,1],[1,1]],"phi":[[0.2,0],[0.2,0],[0.1,0]],"S":[],"theta":[]})");
    const fs::path out1 = fixture_dir() / "det1";
    const fs::path out2 = fixture_dir() / "det2";
    const std::string args = "simulate --model " + fo + " --noise gaussian --size 24,24 --trunc 10 --seed 9 --out ";
    CHECK(run(args + out1.string(), "SPATIAL_ARMA_THREADS=1").exit_code == 0);
    CHECK(run(args + out2.string(), "SPATIAL_ARMA_THREADS=4").exit_code == 0);
    for (const char* name : {"field.csv", "field.pgm", "residual.json"}) CHECK(slurp(out1 / name) == slurp(out2 / name));

    const RunResult a = run("check --model " + fo + " --noise gaussian", "SPATIAL_ARMA_THREADS=1");
    const RunResult b = run("check --model " + fo + " --noise gaussian", "SPATIAL_ARMA_THREADS=4");
    CHECK(a.stdout_text == b.stdout_text);
}
