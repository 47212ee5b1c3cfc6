#include "properties.hpp"

#include <doctest.h>

namespace {

void report(const props::Result& r) {
    INFO(r.name << ": " << r.failures << " of " << r.samples << " failed, worst " << r.worst);
    CHECK(r.ok());
}

}  // namespace

TEST_CASE("derivatives agree with finite differences at 1000 random points") {
    report(props::derivatives_vs_fd(1000));
}

TEST_CASE("odd root-count parity at 500 random (Omega, F)") { report(props::odd_root_parity(500)); }

TEST_CASE("resonance energy-balance identity at 500 random points") { report(props::energy_identity(500)); }

TEST_CASE("Abel-Liouville identity on every converged orbit") {
    const auto orbits = props::sample_orbits(40);
    CHECK(orbits.size() >= 40);
    report(props::abel_liouville(orbits));
}

TEST_CASE("averaged damping quadrature matches the closed forms") { report(props::quadrature_vs_closed_form(500)); }
