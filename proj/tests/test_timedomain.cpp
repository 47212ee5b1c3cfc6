#include "irc/hbcore.hpp"
#include "irc/timedomain.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace irc;

namespace {

const DampingLaw fig1 = DampingLaw::quintic({0.1, -0.6});

double settled_amplitude(const DampingLaw& law, double f, double omega, double x0, double v0, double periods) {
    const auto tr = integrate(law, f, omega, {x0, v0, 0.0}, periods, 64);
    double peak = 0.0;
    for (std::size_t i = tr.x.size() - 10 * 64; i < tr.x.size(); ++i)
        peak = std::max(peak, std::abs(tr.x[i]));
    return peak;
}

std::vector<PeriodicOrbit> orbits_from_hb(const DampingLaw& law, double f, double omega, double x_max) {
    std::vector<PeriodicOrbit> out;
    for (double X : hb_amplitudes(law, omega, f, x_max)) {
        const auto [x0, v0] = harmonic_initial_state(law, X, omega, f);
        out.push_back(shoot(law, f, omega, {x0, v0, 0.0}));
    }
    return out;
}

void check_orbit_identities(const PeriodicOrbit& o) {
    CHECK(o.liouville_det == doctest::Approx(o.multiplier_product()).epsilon(1e-6));
    CHECK(o.energy_dissipated == doctest::Approx(o.energy_input).epsilon(1e-6).scale(1e-10));
    CHECK(o.residual <= 1e-9 * (1 + std::hypot(o.initial.x, o.initial.v)));
}

}  // namespace

TEST_CASE("coexisting attractors at f = 0.009") {
    const double low = settled_amplitude(fig1, 0.009, 1.0, 0.0, 0.38, 300);
    const double high = settled_amplitude(fig1, 0.009, 1.0, 0.0, 0.39, 300);
    CHECK(low == doctest::Approx(0.232).epsilon(0.01));
    CHECK(high == doctest::Approx(0.684).epsilon(0.01));
    CHECK(high / low > 1.5);
}

TEST_CASE("free decay without negative damping") {
    const auto law = DampingLaw::quintic({0.1, 0.2});
    const auto tr = integrate(law, 0.0, 1.0, {0.5, 0.0, 0.0}, 100, 8);
    // energy x^2 + v^2 never grows when Fd(v) v >= 0
    for (std::size_t i = 8; i < tr.x.size(); i += 8)
        CHECK(std::hypot(tr.x[i], tr.v[i]) <= std::hypot(tr.x[i - 8], tr.v[i - 8]) + 1e-10);  // abs_ode noise floor
    CHECK(std::hypot(tr.x.back(), tr.v.back()) < 1e-8);
}

TEST_CASE("integrate: sampling and input validation") {
    const auto tr = integrate(fig1, 0.009, 1.3, {0.1, 0.2, 0.0}, 2, 10);
    REQUIRE(tr.t.size() == 21);
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.t.back() == doctest::Approx(2 * 2 * M_PI / 1.3));
    CHECK(tr.x.front() == 0.1);
    CHECK_THROWS_AS(integrate(fig1, 0.009, -1.0, {0, 0, 0}, 2), InvalidArgument);
    CHECK_THROWS_AS(integrate(fig1, 0.009, 1.0, {NAN, 0, 0}, 2), InvalidArgument);
    const auto it = poincare_iterates(fig1, 0.009, 1.3, 0.1, 0.2, 2);
    REQUIRE(it.size() == 3);
    CHECK(it[1][0] == doctest::Approx(tr.x[10]).epsilon(1e-8));
    CHECK(it[2][1] == doctest::Approx(tr.v[20]).epsilon(1e-8));
}

TEST_CASE("three periodic orbits at f = 0.009, w = 1") {
    const auto orbits = orbits_from_hb(fig1, 0.009, 1.0, 2.0);
    REQUIRE(orbits.size() == 3);
    CHECK(orbits[0].stable);
    CHECK_FALSE(orbits[1].stable);
    CHECK(orbits[2].stable);
    CHECK(orbits[0].amplitude == doctest::Approx(0.23198).epsilon(1e-4));
    CHECK(orbits[2].amplitude == doctest::Approx(0.68424).epsilon(1e-4));
    for (const auto& o : orbits) {
        check_orbit_identities(o);
        CHECK(o.period == doctest::Approx(2 * M_PI));
        CHECK_FALSE(o.far_from_seed);
    }
    // weak nonlinearity: harmonic balance within 2% on the stable orbits
    const auto X = hb_amplitudes(fig1, 1.0, 0.009, 2.0);
    CHECK(orbits[0].amplitude == doctest::Approx(X[0]).epsilon(0.02));
    CHECK(orbits[2].amplitude == doctest::Approx(X[2]).epsilon(0.02));
}

TEST_CASE("half-period symmetry of a periodic orbit") {
    const auto o = orbits_from_hb(fig1, 0.009, 1.0, 2.0)[2];
    const auto tr = integrate(fig1, 0.009, 1.0, o.initial, 0.5, 64);
    CHECK(tr.x.back() == doctest::Approx(-o.initial.x).epsilon(1e-8).scale(1e-8));
    CHECK(tr.v.back() == doctest::Approx(-o.initial.v).epsilon(1e-8).scale(1e-8));
}

TEST_CASE("linear limit: multipliers of the rest state") {
    const double c1 = 0.1, w = 1.3;
    const auto law = DampingLaw::quintic({c1, 0.0});
    const auto o = shoot(law, 0.0, w, {0.01, 0.0, 0.0});
    CHECK(std::abs(o.initial.x) < 1e-10);
    CHECK(std::abs(o.initial.v) < 1e-10);
    CHECK(o.stable);
    const double T = 2 * M_PI / w;
    const std::complex<double> lam = std::exp(std::complex<double>(-c1 / 2, std::sqrt(1 - c1 * c1 / 4)) * T);
    for (const auto& mu : o.multipliers) {
        CHECK(std::abs(mu) == doctest::Approx(std::exp(-M_PI * c1 / w)).epsilon(1e-8));
        CHECK(std::abs(mu.real()) == doctest::Approx(std::abs(lam.real())).epsilon(1e-7));
    }
}

TEST_CASE("zone-3 IRC stability at small forcing") {
    const auto law = DampingLaw::quintic({0.1, -0.8});
    const auto orbits = orbits_from_hb(law, 0.001, 1.0, 2.0);
    REQUIRE(orbits.size() == 5);
    CHECK(orbits[0].stable);         // main branch
    CHECK_FALSE(orbits[1].stable);   // lower IRC, both sides
    CHECK_FALSE(orbits[2].stable);
    CHECK_FALSE(orbits[3].stable);   // upper IRC, lower side
    CHECK(orbits[4].stable);         // upper IRC, upper side
    for (const auto& o : orbits)
        check_orbit_identities(o);
}

TEST_CASE("free limit cycles at c3 = -0.8") {
    const auto law = DampingLaw::quintic({0.1, -0.8});
    const auto lower = limit_cycle(law, 0.46);
    const auto upper = limit_cycle(law, 0.86);
    CHECK(lower.amplitude == doctest::Approx(0.4636).epsilon(5e-4));
    CHECK(upper.amplitude == doctest::Approx(0.8654).epsilon(5e-4));
    CHECK_FALSE(lower.stable);
    CHECK(upper.stable);
    CHECK(lower.f == 0.0);
}

TEST_CASE("IRC continuation closes and folds where harmonic balance folds") {
    const double f = 0.008;
    const double X = hb_amplitudes(fig1, 1.0, f, 2.0).back();
    const auto [x0, v0] = harmonic_initial_state(fig1, X, 1.0, f);
    const auto start = shoot(fig1, f, 1.0, {x0, v0, 0.0});
    const auto br = continue_branch(fig1, start);
    CHECK(br.closed);
    CHECK(br.termination == Termination::closed_loop);
    std::vector<double> folds;
    for (const auto& p : br.points) {
        check_orbit_identities(p.orbit);
        if (p.fold)
            folds.push_back(p.param);
        CHECK_FALSE(p.neimark_sacker);
    }
    REQUIRE(folds.size() == 2);

    // harmonic-balance folds of the IRC: extreme frequencies of the isolated branch
    double w_lo = 10, w_hi = 0;
    for (const auto& b : trace_frequency_response(fig1, f))
        if (b.kind == BranchKind::isolated)
            for (const auto& s : b.samples) {
                w_lo = std::min(w_lo, s.omega);
                w_hi = std::max(w_hi, s.omega);
            }
    std::sort(folds.begin(), folds.end());
    CHECK(folds[0] == doctest::Approx(w_lo).epsilon(0.02));
    CHECK(folds[1] == doctest::Approx(w_hi).epsilon(0.02));
}

TEST_CASE("continuation in f leaves the range") {
    const auto o = orbits_from_hb(fig1, 0.009, 1.0, 2.0)[0];
    ContinuationOptions opts;
    opts.param = ContinuationParam::f;
    opts.p_min = 0.005;
    opts.p_max = 0.0095;
    const auto br = continue_branch(fig1, o, opts);
    CHECK(br.termination == Termination::left_range);
    CHECK_FALSE(br.closed);
    CHECK(br.points.size() > 3);
}

TEST_CASE("basins of the two coexisting attractors") {
    const auto orbits = orbits_from_hb(fig1, 0.009, 1.0, 2.0);
    BasinOptions opts;
    const auto grid = basin_grid(fig1, 0.009, 1.0, orbits, {-1, 1, -1, 1}, 9, opts);
    REQUIRE(grid.attractors.size() == 2);
    CHECK(grid.labels.size() == 81);
    CHECK(grid.x_at(0) == -1.0);
    CHECK(grid.v_at(8) == 1.0);
    const int small = grid.attractors[0].amplitude < grid.attractors[1].amplitude ? 0 : 1;
    CHECK(classify_initial_state(fig1, 0.009, 1.0, grid.attractors, 0.0, 0.38, opts) == small);
    CHECK(classify_initial_state(fig1, 0.009, 1.0, grid.attractors, 0.0, 0.39, opts) == 1 - small);
    std::set<int> seen(grid.labels.begin(), grid.labels.end());
    CHECK(seen.count(0) == 1);
    CHECK(seen.count(1) == 1);

    // The saddle orbit is not captured by either attractor within a few periods.
    BasinOptions quick = opts;
    quick.max_periods = 5;
    CHECK(classify_initial_state(fig1, 0.009, 1.0, grid.attractors, orbits[1].initial.x, orbits[1].initial.v, quick) ==
          -1);

    // Thread count does not change the raster.
    BasinOptions one = opts;
    one.threads = 1;
    CHECK(basin_grid(fig1, 0.009, 1.0, orbits, {-1, 1, -1, 1}, 9, one).labels == grid.labels);
}

TEST_CASE("a single attractor labels every cell") {
    const auto orbits = orbits_from_hb(fig1, 0.02, 1.0, 2.0);
    REQUIRE(orbits.size() == 1);
    const auto grid = basin_grid(fig1, 0.02, 1.0, orbits, {-1, 1, -1, 1}, 5);
    CHECK(grid.undecided_fraction == 0.0);
    for (int l : grid.labels)
        CHECK(l == 0);
    std::vector<PeriodicOrbit> unstable = {orbits_from_hb(fig1, 0.009, 1.0, 2.0)[1]};
    CHECK_THROWS_AS(basin_grid(fig1, 0.009, 1.0, unstable, {-1, 1, -1, 1}, 3), InvalidArgument);
}

TEST_CASE("locate_irc in zone 2") {
    auto search = locate_irc(fig1, 0.008, seeds_at_resonance(fig1, 0.008, {0.58}));
    REQUIRE(search.loops.size() == 1);
    CHECK(search.loops[0].branch.closed);
    CHECK(search.loops[0].branch.min_amplitude() < 0.58);
    CHECK(search.loops[0].branch.max_amplitude() > 0.58);

    search = locate_irc(fig1, 0.004, seeds_at_resonance(fig1, 0.004, {0.58}));
    CHECK(search.loops.empty());
    CHECK(search.rejected.size() == 1);

    // seeds taken from the harmonic-balance trace
    const auto seeds = seeds_from_trace(trace_frequency_response(fig1, 0.008));
    REQUIRE(seeds.size() == 1);
    search = locate_irc(fig1, 0.008, seeds);
    REQUIRE(search.loops.size() == 1);
    CHECK(search.loops[0].hb_component == seeds[0].hb_component);
}

TEST_CASE("locate_irc for the sine + cubic law") {
    const auto law = DampingLaw::sine_cubic(0.1, 1e-5);
    const auto seeds = seeds_from_trace(trace_frequency_response(law, 0.0025));
    REQUIRE(seeds.size() == 4);
    const auto search = locate_irc(law, 0.0025, seeds);
    CHECK(search.loops.size() == 4);
    for (const auto& l : search.loops)
        CHECK(l.branch.closed);
}

TEST_CASE("stability annotation") {
    auto branches = trace_frequency_response(fig1, 0.009);
    auto& main = branches[0];
    REQUIRE(main.kind == BranchKind::main);
    annotate_stability(fig1, 0.009, main, 50);
    std::size_t known = 0;
    for (std::size_t i = 0; i < main.samples.size(); ++i) {
        if (i % 50 == 0) {
            CHECK(main.samples[i].stability != Stability::unknown);
            ++known;
        } else {
            CHECK(main.samples[i].stability == Stability::unknown);
        }
    }
    CHECK(known > 5);
}
