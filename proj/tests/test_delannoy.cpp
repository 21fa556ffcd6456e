#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sarma/delannoy.hpp"

using namespace sarma;

namespace {

/// Leibniz expansion of the Rodrigues derivative:
/// P_n = (-2)^{-n}/n! sum_j C(n,j) (-1)^j fall(n+a, j) fall(n+b, n-j) (1-x)^{n-j} (1+x)^j.
double jacobi_rodrigues(int n, double a, double b, double x) {
    auto falling = [](double top, int m) {
        double r = 1.0;
        for (int i = 0; i < m; ++i) r *= top - i;
        return r;
    };
    auto binom = [](int nn, int kk) {
        double r = 1.0;
        for (int i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
        return r;
    };
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += binom(n, j) * sign * falling(n + a, j) * falling(n + b, n - j) * std::pow(1.0 - x, n - j) *
               std::pow(1.0 + x, j);
    }
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return sum * std::pow(-2.0, -n) / fact;
}

}  // namespace

TEST_CASE("recursion reproduces classical Delannoy numbers") {
    const DelannoyParams ones{1.0, 1.0, 1.0};
    CHECK(delannoy_recursive(ones, 1, 1) == 3.0);
    CHECK(delannoy_recursive(ones, 2, 2) == 13.0);
    CHECK(delannoy_recursive(ones, 3, 3) == 63.0);
    CHECK_THROWS_AS(delannoy_recursive(ones, -1, 0), std::invalid_argument);
}

TEST_CASE("boundary rows are pure powers") {
    const DelannoyParams p{-0.6, 0.4, 0.25};
    for (int n = 0; n <= 12; ++n) CHECK(delannoy_recursive(p, n, 0) == Catch::Approx(std::pow(-0.6, n)).margin(1e-15));
    for (int k = 0; k <= 12; ++k) CHECK(delannoy_closed_a(p, 0, k) == Catch::Approx(std::pow(0.4, k)).margin(1e-15));
}

TEST_CASE("phi3 = 0 collapses to the binomial form") {
    const DelannoyParams p{0.7, -0.45, 0.0};
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    for (int n = 0; n <= 12; ++n)
        for (int k = 0; k + n <= 12; ++k) {
            const double expect = binom(n + k, n) * std::pow(0.7, n) * std::pow(-0.45, k);
            CHECK(delannoy_recursive(p, n, k) == Catch::Approx(expect).epsilon(1e-12).margin(1e-15));
        }
}

TEST_CASE("three-way agreement of recursion and both closed forms") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const DelannoyParams p{u(gen), u(gen), u(gen)};
        // relative to the absolute-value term sums: the signed value can cancel
        // to far below the roundoff floor of any of the three routes
        const DelannoyParams abs_a{std::abs(p.phi1), std::abs(p.phi2), std::abs(p.phi3)};
        const DelannoyParams abs_b{std::abs(p.phi1), std::abs(p.phi2),
                                   std::abs(p.phi1 * p.phi2 + p.phi3) - std::abs(p.phi1) * std::abs(p.phi2)};
        const auto table = delannoy_table(p, 30, 30);
        for (int n = 0; n <= 30; ++n)
            for (int k = 0; k <= 30; ++k) {
                const double r = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
                const double a = delannoy_closed_a(p, n, k);
                const double b = delannoy_closed_b(p, n, k);
                const double scale = std::max({1.0, delannoy_closed_a(abs_a, n, k), delannoy_closed_b(abs_b, n, k)});
                CHECK(std::abs(a - r) <= 1e-10 * scale);
                CHECK(std::abs(b - r) <= 1e-10 * scale);
            }
    }
}

TEST_CASE("closed form b hand example") {
    const DelannoyParams p{0.5, 0.3, 0.1};
    CHECK(delannoy_closed_b(p, 1, 1) == Catch::Approx(0.40).margin(1e-15));
    // phi3 = -phi1 phi2 kills every j >= 1 term
    const DelannoyParams q{0.5, 0.3, -0.15};
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= 8; ++k)
            CHECK(delannoy_closed_b(q, n, k) == Catch::Approx(std::pow(0.5, n) * std::pow(0.3, k)).margin(1e-15));
}

TEST_CASE("exact integer arithmetic anchors the floating path") {
    // Pascal's triangle in 64-bit integers
    std::vector<std::vector<long long>> pascal(41);
    for (int n = 0; n <= 40; ++n) {
        pascal[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1);
        for (int k = 1; k < n; ++k)
            pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
                pascal[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
                pascal[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
    }
    namespace dd = sarma::detail;
    for (int n = 0; n <= 40; ++n)
        for (int k = 0; k <= n; ++k)
            CHECK(dd::binom(n, k) == static_cast<double>(pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]));

    // integer-weight tables stay exact in doubles inside the 2^53 window
    for (int w1 : {-1, 0, 1})
        for (int w2 : {-1, 0, 1})
            for (int w3 : {-1, 0, 1}) {
                std::vector<std::vector<long long>> exact(16, std::vector<long long>(16, 0));
                exact[0][0] = 1;
                for (int i = 0; i <= 15; ++i)
                    for (int j = 0; j <= 15; ++j) {
                        if (i == 0 && j == 0) continue;
                        long long v = 0;
                        if (i > 0) v += w1 * exact[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
                        if (j > 0) v += w2 * exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)];
                        if (i > 0 && j > 0) v += w3 * exact[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
                        exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                    }
                const DelannoyParams p{static_cast<double>(w1), static_cast<double>(w2), static_cast<double>(w3)};
                const auto table = delannoy_table(p, 15, 15);
                for (int i = 0; i <= 15; ++i)
                    for (int j = 0; j <= 15; ++j) {
                        const double want = static_cast<double>(exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                        CHECK(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == want);
                        CHECK(delannoy_closed_a(p, i, j) == Catch::Approx(want).margin(1e-6).epsilon(1e-12));
                    }
            }
}

TEST_CASE("transpose symmetry") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double a = u(gen), b = u(gen), c = u(gen);
        for (int n = 0; n <= 12; ++n)
            for (int k = 0; k <= 12; ++k)
                CHECK(delannoy_closed_b({a, b, c}, n, k) == delannoy_closed_b({b, a, c}, k, n));
    }
}

TEST_CASE("jacobi polynomial basics") {
    CHECK(jacobi_poly({0, 0.7, 2.3, 0.4}) == 1.0);
    for (double x : {-0.9, -0.3, 0.0, 0.5, 1.0}) CHECK(jacobi_poly({1, 0.0, 0.0, x}) == Catch::Approx(x).margin(1e-15));
    CHECK(jacobi_poly({2, 0.0, 1.0, 0.3}) == Catch::Approx(jacobi_rodrigues(2, 0.0, 1.0, 0.3)).margin(1e-12));
    CHECK_THROWS_AS(jacobi_poly({2, -1.0, 0.0, 0.3}), std::domain_error);
    CHECK_THROWS_AS(jacobi_poly({-1, 0.0, 0.0, 0.3}), std::invalid_argument);
}

TEST_CASE("jacobi recurrence matches the Rodrigues expansion for n <= 5") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ua(-0.9, 3.0), ux(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const double a = ua(gen), b = ua(gen), x = ux(gen);
        for (int n = 0; n <= 5; ++n)
            CHECK(jacobi_poly({n, a, b, x}) == Catch::Approx(jacobi_rodrigues(n, a, b, x)).margin(1e-12).epsilon(1e-12));
    }
}

TEST_CASE("jacobi-delannoy identity examples") {
    const DelannoyParams p{0.5, 0.3, 0.1};
    const auto r00 = jacobi_delannoy_identity(p, 0, 0);
    CHECK(r00.lhs == 1.0);
    CHECK(r00.rhs == 1.0);
    const auto r25 = jacobi_delannoy_identity(p, 2, 5);
    CHECK(r25.abs_diff <= 1e-9);

    const auto ones = jacobi_delannoy_identity({1.0, 1.0, 1.0}, 0, 2);
    CHECK(ones.lhs == 13.0);
    CHECK(ones.rhs == Catch::Approx(13.0).margin(1e-10));  // P_2^{(0,0)}(-3) = (3*9-1)/2

    CHECK_THROWS_AS(jacobi_delannoy_identity({0.5, 0.3, 0.0}, 0, 1), std::invalid_argument);
}

TEST_CASE("jacobi identity over the full sweep") {
    std::mt19937_64 gen(555);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int triples = 0;
    while (triples < 20) {
        DelannoyParams p{u(gen), u(gen), u(gen)};
        if (std::abs(p.phi3) < 0.05) continue;
        ++triples;
        for (int beta = 0; beta <= 10; ++beta)
            for (int k = 0; k <= 40; k += 4) {
                const auto r = jacobi_delannoy_identity(p, beta, k);
                CHECK(r.abs_diff <= 1e-8 * std::max(1.0, std::abs(r.lhs)));
            }
    }
}

TEST_CASE("bessel J0/J1 values") {
    auto [j0_0, j1_0] = bessel_j01(0.0);
    CHECK(j0_0 == 1.0);
    CHECK(j1_0 == 0.0);
    CHECK(std::abs(bessel_j01(2.404825557695773).first) <= 1e-6);
    CHECK_THROWS_AS(bessel_j01(-1.0), std::domain_error);

    for (double x = 0.1; x < 60.0; x += 0.37) {
        auto [j0, j1] = bessel_j01(x);
        CHECK(std::abs(j0 - std::cyl_bessel_j(0.0, x)) <= 1e-8);
        CHECK(std::abs(j1 - std::cyl_bessel_j(1.0, x)) <= 1e-8);
    }
}

TEST_CASE("bessel leading asymptotic bound") {
    for (double x = 20.0; x < 200.0; x += 7.3) {
        const double lead = std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x - std::numbers::pi / 4.0);
        CHECK(std::abs(bessel_j01(x).first - lead) <= 0.5 * std::pow(x, -1.5));
    }
}

TEST_CASE("asymptotic decay diagnostic slopes") {
    const auto d0 = asymptotic_decay_diagnostic(std::numbers::pi / 2.0, 0, 10, 200);
    CHECK(d0.loglog_slope <= -0.9);
    double max_rn = 0.0;
    for (const auto& row : d0.rows) max_rn = std::max(max_rn, row.residual_times_n);
    CHECK(max_rn < 1.0);  // residual * N stays bounded over the range

    const auto d3 = asymptotic_decay_diagnostic(1.0, 3, 10, 100);
    CHECK(d3.loglog_slope <= -0.9);

    const auto d_n0 = asymptotic_decay_diagnostic(0.7, 0, 0, 0);
    CHECK(d_n0.rows.size() == 1);  // P_0 = 1: the residual is recorded, nothing asserted

    CHECK_THROWS_AS(asymptotic_decay_diagnostic(0.0, 0, 1, 10), std::domain_error);
    CHECK_THROWS_AS(asymptotic_decay_diagnostic(3.2, 0, 1, 10), std::domain_error);
}

TEST_CASE("counting function basics") {
    CHECK(counting_function({0.5, 0.5, 0.0}, 1.0001, 40) == 1);  // only psi_00 = 1 counts
    const std::int64_t f100 = counting_function({0.5, 0.3, 0.1}, 100.0, 96);
    CHECK(f100 > 0);
    // box too small for the requested threshold
    CHECK_THROWS_AS(counting_function({0.9, 0.9, 0.0}, 1e6, 8), std::invalid_argument);
}

TEST_CASE("counting function lower bound f(x) >= C log^2 x") {
    const std::vector<DelannoyParams> cases = {{0.0, 0.5, 0.25}, {0.5, 0.3, 0.1}, {0.5, 0.5, -0.5}};
    for (const auto& p : cases) {
        for (double x : {10.0, 1e2, 1e3, 1e4, 1e5, 1e6}) {
            const double f = static_cast<double>(counting_function(p, x, 128));
            const double lg = std::log(x);
            CHECK(f / (lg * lg) >= 0.05);
        }
    }
}

TEST_CASE("l1 sphere count") {
    CHECK(l1_sphere_count(1, 0) == 1);
    for (int n = 1; n <= 20; ++n) CHECK(l1_sphere_count(1, n) == 2);
    for (int d = 1; d <= 5; ++d) CHECK(l1_sphere_count(d, 0) == 1);
    CHECK(l1_sphere_count(2, 3) == 12);
    CHECK(l1_sphere_count(3, 2) == 18);
}

TEST_CASE("l1 sphere count against brute force") {
    for (int d = 1; d <= 3; ++d)
        for (int n = 0; n <= 6; ++n) {
            std::int64_t brute = 0;
            const int side = 2 * n + 1;
            std::int64_t total = 1;
            for (int i = 0; i < d; ++i) total *= side;
            for (std::int64_t flat = 0; flat < total; ++flat) {
                std::int64_t rem = flat;
                long norm = 0;
                for (int i = 0; i < d; ++i) {
                    norm += std::abs(static_cast<long>(rem % side) - n);
                    rem /= side;
                }
                if (norm == n) ++brute;
            }
            CHECK(l1_sphere_count(d, n) == brute);
        }
}

TEST_CASE("l1 sphere count polynomial bound") {
    // constants from the constructive recursion: C_1 = 2, C_{d+1} = 2 C_d + 2
    double c_d = 2.0;
    for (int d = 1; d <= 4; ++d) {
        for (int n = 1; n <= 100; ++n)
            CHECK(static_cast<double>(l1_sphere_count(d, n)) <= c_d * std::pow(static_cast<double>(n), d - 1));
        c_d = 2.0 * c_d + 2.0;
    }
}
