#include "irc/hbcore.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace irc;

namespace {

// Independent transcription of the balance polynomial.
double g_oracle(double A, double W, double F, double c1, double c3) {
    return 100 * std::pow(A * W, 5) + 60 * std::pow(A, 4) * c3 * std::pow(W, 4) +
           std::pow(A * W, 3) * (20 * c1 + 9 * c3 * c3) + 6 * A * A * c1 * c3 * W * W + A * ((c1 * c1 - 2) * W + W * W + 1) -
           F;
}

// At W = 1 the balance reads A q(A)^2 = F with q = c1 + 3 c3 A + 10 A^2; its
// stationary points solve c1 + 9 c3 A + 50 A^2 = 0.
std::pair<double, double> resonance_extrema(double c1, double c3) {
    const double d = std::sqrt(81 * c3 * c3 - 200 * c1);
    return {(-9 * c3 - d) / 100, (-9 * c3 + d) / 100};
}

double resonance_F(double A, double c1, double c3) {
    const double q = c1 + 3 * c3 * A + 10 * A * A;
    return A * q * q;
}

// Sign changes of g on a fine grid: distinct simple roots in (0, A_max).
std::size_t count_roots_by_scan(double W, double F, const Params& p, double A_max, std::size_t n) {
    std::size_t count = 0;
    double prev = g_oracle(0.0, W, F, p.c1, p.c3);
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = g_oracle(A_max * i / n, W, F, p.c1, p.c3);
        if ((prev < 0) != (cur < 0))
            ++count;
        prev = cur;
    }
    return count;
}

}  // namespace

TEST_CASE("eval_g: hand values") {
    CHECK(eval_g(0.0, 1.3, 0.02, {0.1, -0.6}) == -0.02);
    CHECK(eval_g(1.0, 1.0, 0.0, {0.1, 0.0}) == doctest::Approx(100 + 20 * 0.1 + 0.01).epsilon(1e-14));
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double A = u(rng), W = 0.2 + 2 * u(rng), F = 0.01 * u(rng), c1 = 0.01 + u(rng), c3 = -1 + 2 * u(rng);
        CHECK(eval_g(A, W, F, {c1, c3}) == doctest::Approx(g_oracle(A, W, F, c1, c3)).epsilon(1e-12));
    }
}

TEST_CASE("eval_g vanishes at the resonant stationary point") {
    const auto [A3, A4] = resonance_extrema(0.1, -0.6);
    CHECK(A4 == doctest::Approx(0.084265).epsilon(1e-5));
    CHECK(std::abs(eval_g(A4, 1.0, resonance_F(A4, 0.1, -0.6), {0.1, -0.6})) < 1e-10);
    CHECK(std::abs(eval_g(A3, 1.0, resonance_F(A3, 0.1, -0.6), {0.1, -0.6})) < 1e-10);
}

TEST_CASE("first derivatives") {
    const Params p{0.1, -0.6};
    CHECK(eval_dg_dOmega(0.0, 0.7, p) == 0.0);
    CHECK(eval_dg_dOmega(0.0, 1.4, p) == 0.0);
    const auto [A3, A4] = resonance_extrema(0.1, -0.6);
    CHECK(std::abs(eval_dg_dA(A3, 1.0, p)) < 1e-10);
    CHECK(std::abs(eval_dg_dA(A4, 1.0, p)) < 1e-10);
    // 500 + 3 * 20 * 0.1 + (0.01 - 2 + 1 + 1)
    CHECK(eval_dg_dA(1.0, 1.0, {0.1, 0.0}) == doctest::Approx(506.01).epsilon(1e-14));
    const double h = 1e-6;
    const double fd = (g_oracle(1 + h, 1, 0, 0.1, 0) - g_oracle(1 - h, 1, 0, 0.1, 0)) / (2 * h);
    CHECK(fd == doctest::Approx(506.01).epsilon(1e-8));
}

TEST_CASE("Hessian determinant") {
    // At A = 0 only g_AOmega = c1^2 - 2 + 2 W survives in the off-diagonal; g_WW = 0.
    for (double W : {0.5, 1.0, 1.7}) {
        const double c1 = 0.1;
        const double expected = -std::pow(c1 * c1 - 2 + 2 * W, 2);
        CHECK(eval_hessian_det(0.0, W, {c1, -0.6}) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(eval_hessian_det(0.0, 1.0, {0.1, -0.6}) == doctest::Approx(-1e-4).epsilon(1e-12));

    for (double c3 : {-0.55, -0.8}) {
        const double A4 = resonance_extrema(0.1, c3).second;
        const double H = eval_hessian_det(A4, 1.0, {0.1, c3});
        if (c3 == -0.55)
            CHECK(H > 0.0);
        else
            CHECK(H < 0.0);
        const auto checked = hessian_det_checked(A4, 1.0, {0.1, c3});
        CHECK(checked.consistent);
        CHECK(checked.value == H);
    }
}

TEST_CASE("g_partial matches the printed derivatives") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double A = u(rng), W = 0.2 + 2 * u(rng), F = 0.01 * u(rng);
        const Params p{0.01 + u(rng), -1 + 2 * u(rng)};
        CHECK(g_partial(A, W, F, p, 0, 0) == doctest::Approx(eval_g(A, W, F, p)).epsilon(1e-12));
        CHECK(g_partial(A, W, F, p, 1, 0) == doctest::Approx(eval_dg_dA(A, W, p)).epsilon(1e-12));
        CHECK(g_partial(A, W, F, p, 0, 1) == doctest::Approx(eval_dg_dOmega(A, W, p)).epsilon(1e-12));
        CHECK(g_partial(A, W, F, p, 2, 0) == doctest::Approx(eval_d2g_dA2(A, W, p)).epsilon(1e-12));
        const double det = g_partial(A, W, F, p, 2, 0) * g_partial(A, W, F, p, 0, 2) -
                           std::pow(g_partial(A, W, F, p, 1, 1), 2);
        CHECK(eval_hessian_det(A, W, p) == doctest::Approx(det).epsilon(1e-9).scale(1e-6));
        CHECK(g_partial(A, W, F, p, 6, 0) == 0.0);
    }
}

TEST_CASE("solve_amplitudes") {
    auto r = solve_amplitudes(1.0, 0.0, {0.1, 0.0});
    REQUIRE(r.A.size() == 1);
    CHECK(r.A[0] == 0.0);

    // Zeros of q = c1 + 3 c3 A + 10 A^2 at F = 0.
    const double c3 = -0.8;
    const double d = std::sqrt(9 * c3 * c3 - 40 * 0.1);
    r = solve_amplitudes(1.0, 0.0, {0.1, c3});
    REQUIRE(r.A.size() == 3);
    CHECK(r.A[0] == doctest::Approx(0.0).scale(1.0));
    // double roots: Newton polishing is limited to about sqrt(eps)
    CHECK(r.A[1] == doctest::Approx((-3 * c3 - d) / 20).epsilon(1e-7));
    CHECK(r.A[2] == doctest::Approx((-3 * c3 + d) / 20).epsilon(1e-7));
    CHECK(2 * std::sqrt(r.A[1]) == doctest::Approx(0.4633).epsilon(1e-4 / 0.4633));
    CHECK(2 * std::sqrt(r.A[2]) == doctest::Approx(0.8633).epsilon(1e-4 / 0.8633));

    // Just above the isola forcing: a fine scan of g counts three roots.
    const double F = 0.00565 * 0.00565;
    const Params p{0.1, -0.6};
    const std::size_t scanned = count_roots_by_scan(1.0, F, p, 1.0, 1000000);
    CHECK(scanned == 3);
    r = solve_amplitudes(1.0, F, p);
    CHECK(r.A.size() == scanned);
    for (double A : r.A)
        CHECK(std::abs(eval_g(A, 1.0, F, p)) <= 1e-10);
}

TEST_CASE("solve_amplitudes rejects bad input") {
    CHECK_THROWS_AS(solve_amplitudes(0.0, 0.01, {0.1, -0.6}), InvalidArgument);
    CHECK_THROWS_AS(solve_amplitudes(1.0, -0.01, {0.1, -0.6}), InvalidArgument);
    CHECK_THROWS_AS(solve_amplitudes(1.0, 0.01, {0.0, -0.6}), InvalidArgument);
}

TEST_CASE("general-law residual equals 4 g for the quintic law") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Params p{0.01 + u(rng), -1 + 2 * u(rng)};
        const double X = 1.5 * u(rng), w = 0.3 + 1.5 * u(rng), f = 0.05 * u(rng);
        const double A = X * X / 4;
        CHECK(hb_residual(DampingLaw::quintic(p), X, w, f) ==
              doctest::Approx(4 * eval_g(A, w * w, f * f, p)).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("hb_amplitudes agrees with the polynomial roots") {
    const Params p{0.1, -0.6};
    const auto law = DampingLaw::quintic(p);
    const auto X = hb_amplitudes(law, 1.0, 0.009, 2.0);
    const auto r = solve_amplitudes(1.0, 0.009 * 0.009, p);
    REQUIRE(X.size() == r.A.size());
    REQUIRE(X.size() == 3);
    for (std::size_t i = 0; i < X.size(); ++i)
        CHECK(X[i] == doctest::Approx(2 * std::sqrt(r.A[i])).epsilon(1e-9));
}

TEST_CASE("harmonic initial state lies on the harmonic") {
    const auto law = DampingLaw::quintic({0.1, -0.6});
    const double X = hb_amplitudes(law, 1.0, 0.009, 2.0).back();
    const auto [x0, v0] = harmonic_initial_state(law, X, 1.0, 0.009);
    CHECK(x0 * x0 + v0 * v0 == doctest::Approx(X * X).epsilon(1e-12));
    const auto [y0, u0] = harmonic_initial_state(law, 0.5, 1.0, 0.0);
    CHECK(y0 == doctest::Approx(0.5));
    CHECK(u0 == 0.0);
}

TEST_CASE("trace: IRC scenarios") {
    const Params zone2{0.1, -0.6};
    CHECK(count_isolated(trace_frequency_response(zone2, 0.005)) == 0);
    const auto br = trace_frequency_response(zone2, 0.008);
    CHECK(count_isolated(br) == 1);
    CHECK(count_isolated(trace_frequency_response(zone2, 0.012)) == 0);
    CHECK(count_isolated(trace_frequency_response({0.1, -0.8}, 1e-4)) == 2);
    CHECK(count_isolated(trace_frequency_response({0.1, -0.8}, 0.001)) == 2);
    CHECK(count_isolated(trace_frequency_response({0.1, -0.4}, 0.01)) == 0);

    std::size_t main = 0;
    for (const auto& b : br) {
        if (b.kind == BranchKind::main) {
            ++main;
            continue;
        }
        CHECK(b.closed);
        REQUIRE(b.samples.size() > 10);
        const auto& a = b.samples.front();
        const auto& z = b.samples.back();
        CHECK(std::hypot(a.omega - z.omega, a.x_peak - z.x_peak) < 1e-8);
        // the loop crosses resonance inside the S4-predicted amplitude band
        double lo = 1e9, hi = 0;
        for (const auto& s : b.samples) {
            lo = std::min(lo, s.x_peak);
            hi = std::max(hi, s.x_peak);
        }
        CHECK(lo < 0.5806);
        CHECK(hi > 0.5806);
    }
    CHECK(main == 1);
}

TEST_CASE("trace: every sample satisfies the balance") {
    for (double f : {0.003, 0.008, 0.0115, 0.02}) {
        const Params p{0.1, -0.6};
        for (const auto& b : trace_frequency_response(p, f)) {
            for (const auto& s : b.samples) {
                CHECK(std::abs(eval_g(s.A, s.omega * s.omega, f * f, p)) <= 1e-10 * std::max(1.0, f * f));
                CHECK(s.x_peak == doctest::Approx(2 * std::sqrt(s.A)).epsilon(1e-14));
                CHECK(s.stability == Stability::unknown);
            }
        }
    }
}

TEST_CASE("trace: folds of the main branch") {
    // Linear-like damping: the main branch has no fold.
    auto br = trace_frequency_response({0.1, 0.5}, 0.01);
    REQUIRE(br.size() == 1);
    CHECK(omega_reversals(br[0]) == 0);
    // Between merge and hysteresis the merged main branch folds.
    br = trace_frequency_response({0.1, -0.6}, 0.0105);
    REQUIRE(count_isolated(br) == 0);
    std::size_t folds = 0;
    for (const auto& b : br)
        folds += omega_reversals(b);
    CHECK(folds >= 2);
}

TEST_CASE("trace: rejects bad windows") {
    TraceOptions o;
    o.omega_min = 1.5;
    o.omega_max = 1.0;
    CHECK_THROWS_AS(trace_frequency_response({0.1, -0.6}, 0.01, o), InvalidArgument);
    CHECK_THROWS_AS(trace_frequency_response({0.1, -0.6}, -0.01), InvalidArgument);
}
