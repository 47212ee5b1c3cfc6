#include "irc/model.hpp"
#include "irc/timedomain.hpp"

#include <doctest.h>

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace irc;

TEST_CASE("nondimensionalize: unit inputs are an identity") {
    const auto nd = nondimensionalize({1.0, 1.0, 1.0, 0.0, 1.0, 0.3, 1.2});
    CHECK(nd.params.c1 == doctest::Approx(1.0));
    CHECK(nd.params.c3 == doctest::Approx(0.0));
    CHECK(nd.scales.time == doctest::Approx(1.0));
    CHECK(nd.scales.frequency == doctest::Approx(1.0));
    CHECK(nd.scales.displacement == doctest::Approx(1.0));
    CHECK(nd.scales.forcing == doctest::Approx(1.0));
    CHECK(nd.f == doctest::Approx(0.3));
    CHECK(nd.omega == doctest::Approx(1.2));
}

TEST_CASE("nondimensionalize: coefficient substitution") {
    auto nd = nondimensionalize({1.0, 1.0, 0.1, -0.6, 1.0, 0.0, 1.0});
    CHECK(nd.params.c1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(nd.params.c3 == doctest::Approx(-0.6).epsilon(1e-14));

    nd = nondimensionalize({4.0, 9.0, 0.6, 0.0, 1.0, 0.0, 1.0});
    CHECK(nd.params.c1 == doctest::Approx(0.6 / 6.0).epsilon(1e-14));

    // c3 = ct3 (k m)^(-1/4) ct5^(-1/2)
    nd = nondimensionalize({2.0, 3.0, 0.5, -1.3, 0.7, 0.0, 1.0});
    CHECK(nd.params.c3 == doctest::Approx(-1.3 / std::pow(6.0, 0.25) / std::sqrt(0.7)).epsilon(1e-14));
}

TEST_CASE("nondimensionalize: invalid physical parameters") {
    CHECK_THROWS_AS(nondimensionalize({0.0, 1.0, 0.1, 0.0, 1.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(nondimensionalize({1.0, -1.0, 0.1, 0.0, 1.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(nondimensionalize({1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(nondimensionalize({1.0, 1.0, 0.1, 0.0, 0.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(Params{0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(Params{-0.1, 0.0}), InvalidArgument);
}

TEST_CASE("nondimensionalize: dimensionless simulation reproduces the physical one") {
    const PhysicalParams phys{1.7, 2.9, 0.3, -0.4, 0.8, 0.05, 1.1};
    const auto nd = nondimensionalize(phys);

    // Physical system integrated directly: m y'' + k y + ct1 y' + ct3 y'^3 + ct5 y'^5 = 2 ft cos(wt t).
    using State = std::array<double, 2>;
    auto rhs = [&](const State& s, State& ds, double t) {
        const double v = s[1];
        ds[0] = v;
        ds[1] = (2.0 * phys.ft * std::cos(phys.wt * t) - phys.k * s[0] - phys.ct1 * v - phys.ct3 * v * v * v -
                 phys.ct5 * std::pow(v, 5)) /
                phys.m;
    };
    const double y0 = 0.2, yd0 = -0.1;
    const double periods = 2.0;
    const std::size_t per = 16;
    const auto tr = integrate(DampingLaw::quintic(nd.params), nd.f, nd.omega,
                              {y0 / nd.scales.displacement, yd0 * nd.scales.time / nd.scales.displacement, 0.0},
                              periods, per);
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    double worst = 0.0;
    State s{y0, yd0};
    double t_phys = 0.0;
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        const double target = tr.t[i] * nd.scales.time;
        ode::integrate_adaptive(stepper, rhs, s, t_phys, target, 1e-3);
        t_phys = target;
        worst = std::max(worst, std::abs(s[0] - tr.x[i] * nd.scales.displacement));
    }
    CHECK(tr.t.size() == periods * per + 1);
    CHECK(worst <= 1e-8);
}

TEST_CASE("damping force: quintic values") {
    const auto law = DampingLaw::quintic({0.1, -0.8});
    CHECK(law.force(0.0) == 0.0);
    CHECK(law.force(1.0) == doctest::Approx(0.1 - 0.8 + 1.0).epsilon(1e-15));
    CHECK(std::abs(damping_force(law, 0.3938)) < 1e-4);
    CHECK(damping_force(law, 0.6) < 0.0);
}

TEST_CASE("damping force: negative interval") {
    // Roots of 0.1 - 0.8 s + s^2 in s = v^2.
    const double d = std::sqrt(0.64 - 0.4);
    auto band = damping_negative_interval({0.1, -0.8});
    REQUIRE(band.has_value());
    CHECK(band->first == doctest::Approx(std::sqrt((0.8 - d) / 2)).epsilon(1e-14));
    CHECK(band->second == doctest::Approx(std::sqrt((0.8 + d) / 2)).epsilon(1e-14));
    CHECK(band->first == doctest::Approx(0.3938).epsilon(1e-4 / 0.3938));
    CHECK(band->second == doctest::Approx(0.8031).epsilon(1e-4 / 0.8031));

    CHECK_FALSE(damping_negative_interval({0.1, -0.6}).has_value());
    CHECK_FALSE(damping_negative_interval({0.1, -2.0 * std::sqrt(0.1)}).has_value());
}

namespace {

std::vector<DampingLaw> sample_laws() {
    std::vector<std::pair<double, double>> table;
    for (int i = 0; i <= 50; ++i) {
        const double v = 0.1 * i;
        table.emplace_back(v, 0.1 * v - 0.8 * v * v * v + std::pow(v, 5));
    }
    return {DampingLaw::quintic({0.1, -0.8}), DampingLaw::quintic({0.3, 0.7}), DampingLaw::sine_cubic(0.1, 1e-5),
            DampingLaw::sine_cubic(0.4, -0.02), DampingLaw::tabulated(table)};
}

}  // namespace

TEST_CASE("damping laws are odd") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (const auto& law : sample_laws()) {
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng);
            CHECK(law.force(-v) == -law.force(v));
        }
    }
}

TEST_CASE("dforce matches central differences") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (const auto& law : sample_laws()) {
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng);
            const double h = 1e-5 * std::max(1.0, std::abs(v));
            // fourth-order stencil keeps truncation well below the tolerance
            const double fd = (-law.force(v + 2 * h) + 8 * law.force(v + h) - 8 * law.force(v - h) +
                               law.force(v - 2 * h)) /
                              (12 * h);
            const double scale = std::max(1.0, std::abs(law.dforce(v)));
            CHECK(std::abs(law.dforce(v) - fd) / scale <= 1e-6);
        }
    }
}

TEST_CASE("tabulated law interpolates its samples") {
    std::vector<std::pair<double, double>> table;
    for (int i = 0; i <= 20; ++i)
        table.emplace_back(0.1 * i, std::sin(0.1 * i));
    const auto law = DampingLaw::tabulated(table);
    for (const auto& [v, f] : table)
        CHECK(law.force(v) == doctest::Approx(f).epsilon(1e-12));
    CHECK(law.force(0.55) == doctest::Approx(std::sin(0.55)).epsilon(1e-4));
    CHECK_THROWS_AS(DampingLaw::tabulated({{0.0, 0.0}, {0.5, 1.0}, {0.5, 2.0}}), InvalidArgument);
}

TEST_CASE("config block round trip") {
    const auto law = DampingLaw::from_config({{"law", "sine_cubic"}, {"c1", "0.1"}, {"c3", "1e-5"}});
    CHECK(law.kind() == LawKind::sine_cubic);
    CHECK(law.c1() == 0.1);
    CHECK(law.c3() == 1e-5);
    const auto back = DampingLaw::from_config(law.to_config());
    CHECK(back.force(0.7) == law.force(0.7));

    CHECK_THROWS_AS(DampingLaw::from_config({{"law", "quintic"}, {"c1", "0.1"}, {"c5", "1"}}), InvalidArgument);
    CHECK_THROWS_AS(DampingLaw::from_config({{"law", "cubic"}, {"c1", "0.1"}}), InvalidArgument);
    CHECK_THROWS_AS(DampingLaw::from_config({{"law", "quintic"}, {"c1", "abc"}}), InvalidArgument);
    CHECK_THROWS_AS(DampingLaw::from_config({{"law", "quintic"}, {"c1", "-0.1"}}), InvalidArgument);
    CHECK_THROWS_AS(DampingLaw::from_config({{"law", "table"}}), InvalidArgument);
}

TEST_CASE("table CSV loading") {
    const auto path = std::filesystem::temp_directory_path() / "irc_test_table.csv";
    {
        std::ofstream os(path);
        os << "v,force\n";
        for (int i = 0; i <= 30; ++i) {
            const double v = 0.05 * i;
            os << v << ',' << 0.1 * v - 0.8 * v * v * v + std::pow(v, 5) << '\n';
        }
    }
    const auto law = DampingLaw::from_config({{"law", "table"}, {"table_path", path.string()}});
    CHECK(law.kind() == LawKind::table);
    CHECK(law.force(0.5) == doctest::Approx(0.05 - 0.1 + 0.03125).epsilon(1e-12));
    CHECK(law.force(-0.5) == -law.force(0.5));
    CHECK(law.to_config().at("table_path") == path.string());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(DampingLaw::from_table_csv(path), InvalidArgument);
}
