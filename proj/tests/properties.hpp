// Randomized property checks shared by the property suite and the acceptance
// runner. Every check draws from a seeded mt19937 so runs are reproducible.
#pragma once

#include "irc/energybalance.hpp"
#include "irc/hbcore.hpp"
#include "irc/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace props {

struct Result {
    std::string name;
    std::size_t samples = 0;
    std::size_t failures = 0;
    double worst = 0.0;  ///< largest observed error measure

    bool ok() const { return samples > 0 && failures == 0; }
    void record(double err, double tol) {
        ++samples;
        worst = std::max(worst, err);
        if (!(err <= tol))
            ++failures;
    }
};

struct Sample {
    irc::Params p;
    double A, W, F;
};

inline Sample draw(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {{0.01 + 0.99 * u(rng), -1.0 + 2.0 * u(rng)}, 0.02 + 0.98 * u(rng), 0.2 + 2.3 * u(rng), 0.02 * u(rng)};
}

// Sixth-order central difference of phi at x with step h.
template <class Fn>
double d1(Fn&& phi, double x, double h) {
    return (phi(x + 3 * h) - 9 * phi(x + 2 * h) + 45 * phi(x + h) - 45 * phi(x - h) + 9 * phi(x - 2 * h) -
            phi(x - 3 * h)) /
           (60 * h);
}

/// Printed first/second derivatives and the Hessian determinant against
/// finite differences of g. Errors are relative to the local magnitude of the
/// derivative (largest monomial), which keeps them meaningful near zeros.
inline Result derivatives_vs_fd(std::size_t n, unsigned seed = 20240901) {
    Result r{"derivatives vs finite differences"};
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = draw(rng);
        const auto& p = s.p;
        const double hA = 1e-3 * s.A, hW = 1e-3 * s.W;
        auto gA = [&](double A) { return irc::eval_g(A, s.W, s.F, p); };
        auto gW = [&](double W) { return irc::eval_g(s.A, W, s.F, p); };
        auto scale = [&](int na, int nw) { return irc::g_partial_scale(s.A, s.W, s.F, p, na, nw); };

        r.record(std::abs(d1(gA, s.A, hA) - irc::eval_dg_dA(s.A, s.W, p)) / scale(1, 0), 1e-6);
        r.record(std::abs(d1(gW, s.W, hW) - irc::eval_dg_dOmega(s.A, s.W, p)) / scale(0, 1), 1e-6);

        auto dA = [&](double A) { return d1([&](double a) { return irc::eval_g(a, s.W, s.F, p); }, A, hA); };
        const double gAA = d1(dA, s.A, hA);
        r.record(std::abs(gAA - irc::eval_d2g_dA2(s.A, s.W, p)) / scale(2, 0), 1e-6);

        const double gWW = d1([&](double W) { return d1(gW, W, hW); }, s.W, hW);
        const double gAW = d1([&](double W) { return d1([&](double a) { return irc::eval_g(a, W, s.F, p); }, s.A, hA); },
                              s.W, hW);
        const double det_scale = scale(2, 0) * scale(0, 2) + scale(1, 1) * scale(1, 1);
        r.record(std::abs(gAA * gWW - gAW * gAW - irc::eval_hessian_det(s.A, s.W, p)) / det_scale, 1e-6);
    }
    return r;
}

/// For F > 0 the number of positive roots of g(., Omega, F) is odd.
inline Result odd_root_parity(std::size_t n, unsigned seed = 20240902) {
    Result r{"odd root-count parity"};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const irc::Params p{0.1, -1.0 + 1.2 * u(rng)};
        const double W = 0.2 + 2.3 * u(rng);
        const double f = 1e-4 + 0.05 * u(rng);
        const auto roots = irc::solve_amplitudes(W, f * f, p);
        std::size_t positive = 0;
        for (double A : roots.A)
            positive += A > 0.0;
        r.record(positive % 2 == 1 ? 0.0 : 1.0, 0.0);
    }
    return r;
}

/// g(A, 1, F) = 0  <=>  fd(2 sqrt(A)) = 2 sqrt(F) for the quintic law.
inline Result energy_identity(std::size_t n, unsigned seed = 20240903) {
    Result r{"resonance energy-balance identity"};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const irc::Params p{0.01 + 0.99 * u(rng), -1.0 + 2.0 * u(rng)};
        const double A = 1e-3 + 0.5 * u(rng);
        const double F = irc::eval_g(A, 1.0, 0.0, p);  // the F that puts (A, 1) on the curve
        const double lhs = std::abs(irc::averaged_damping(irc::DampingLaw::quintic(p), 2.0 * std::sqrt(A)));
        const double rhs = 2.0 * std::sqrt(F);
        const double rel = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
        // skip near-zero F, where the square root amplifies rounding of g
        if (F > 1e-10 * A)
            r.record(rel, 1e-10);
        // and the reverse direction: the residual at the predicted forcing vanishes
        const double fd = irc::averaged_damping(irc::DampingLaw::quintic(p), 2.0 * std::sqrt(A));
        r.record(std::abs(irc::eval_g(A, 1.0, fd * fd / 4.0, p)) / std::max(irc::g_partial_scale(A, 1.0, F, p, 0, 0), 1e-300),
                 1e-12);
    }
    return r;
}

/// Multiplier product against exp(-int Fd'(v) dt) on shooting results.
inline Result abel_liouville(const std::vector<irc::PeriodicOrbit>& orbits) {
    Result r{"Abel-Liouville multiplier product"};
    for (const auto& o : orbits)
        r.record(std::abs(o.multiplier_product() - o.liouville_det) / std::abs(o.liouville_det), 1e-6);
    return r;
}

/// Periodic orbits from harmonic-balance seeds at random (c3, f, omega), plus
/// every point of one continued IRC loop.
inline std::vector<irc::PeriodicOrbit> sample_orbits(std::size_t n, unsigned seed = 20240904) {
    std::vector<irc::PeriodicOrbit> out;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (out.size() < n) {
        const auto law = irc::DampingLaw::quintic({0.1, -0.9 + 0.5 * u(rng)});
        const double f = 0.002 + 0.02 * u(rng), w = 0.8 + 0.4 * u(rng);
        for (double X : irc::hb_amplitudes(law, w, f, 2.0)) {
            const auto [x0, v0] = irc::harmonic_initial_state(law, X, w, f);
            try {
                out.push_back(irc::shoot(law, f, w, {x0, v0, 0.0}));
            } catch (const irc::NumericalError&) {
            }
        }
    }
    const auto law = irc::DampingLaw::quintic({0.1, -0.6});
    const double X = irc::hb_amplitudes(law, 1.0, 0.008, 2.0).back();
    const auto [x0, v0] = irc::harmonic_initial_state(law, X, 1.0, 0.008);
    for (const auto& pt : irc::continue_branch(law, irc::shoot(law, 0.008, 1.0, {x0, v0, 0.0})).points)
        out.push_back(pt.orbit);
    return out;
}

/// Averaged damping: adaptive quadrature against the closed forms.
inline Result quadrature_vs_closed_form(std::size_t n, unsigned seed = 20240905) {
    Result r{"averaged damping quadrature vs closed form"};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c1 = 0.01 + 0.99 * u(rng), c3 = -1.0 + 2.0 * u(rng);
        const double x0 = 2.0 * u(rng);
        for (const auto& law : {irc::DampingLaw::quintic({c1, c3}), irc::DampingLaw::sine_cubic(c1, c3 * 1e-3)}) {
            const double closed = irc::averaged_damping(law, x0);
            const double quad = irc::averaged_damping_quadrature(law, x0);
            // scale: the largest term of the closed form, so cancellation near zeros is not penalized
            const double scale = law.kind() == irc::LawKind::quintic
                                     ? c1 * x0 + 0.75 * std::abs(c3) * x0 * x0 * x0 + 0.625 * std::pow(x0, 5)
                                     : 2 * c1 * std::abs(std::cyl_bessel_j(1.0, x0)) + 0.75e-3 * std::abs(c3) * x0 * x0 * x0;
            r.record(std::abs(closed - quad) / std::max(scale, 1e-300), 1e-10);
        }
    }
    return r;
}

}  // namespace props
