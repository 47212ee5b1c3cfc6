// Time-domain ground truth for x'' + x + Fd(x') = 2 f cos(w t): direct
// integration, shooting with Floquet stability, pseudo-arclength continuation
// of periodic orbits and basins of attraction.
//
// Internally the flow is integrated in the forcing phase tau = w t, so every
// forcing period is tau in [0, 2 pi] and the Poincare section is tau = 0 mod 2 pi.
#pragma once

#include "irc/hbcore.hpp"
#include "irc/model.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace irc {

struct OscState {
    double x = 0.0;
    double v = 0.0;
    double t = 0.0;  ///< time within the forcing period
};

struct TimeDomainOptions {
    double tol_ode = 1e-10;  ///< relative local error
    double abs_ode = 1e-12;
    double tol_shoot = 1e-9;  ///< period-map residual, scaled by 1 + |state|
    int max_iter = 40;
    double tol_stab = 1e-6;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> v;
};

/// Integrates n_periods forcing periods from `initial` and samples the state
/// at `samples_per_period` equally spaced phases per period (plus t = 0).
/// `initial.t` is the starting time. Throws NumericalError when the adaptive
/// step size collapses.
Trajectory integrate(const DampingLaw& law, double f, double omega, const OscState& initial, double n_periods,
                     std::size_t samples_per_period = 64, const TimeDomainOptions& opts = {});

/// Poincare iterates (x, v) at the start of every forcing period, the initial
/// state included.
std::vector<std::array<double, 2>> poincare_iterates(const DampingLaw& law, double f, double omega, double x0,
                                                     double v0, std::size_t n_periods,
                                                     const TimeDomainOptions& opts = {});

enum class ContinuationParam { omega, f };
const char* to_string(ContinuationParam p);

/// One forcing period with the variational equations.
struct PeriodMap {
    std::array<double, 2> end{};       ///< (x, v) after one period
    std::array<double, 4> monodromy{};  ///< row-major d end / d (x0, v0)
    std::array<double, 2> d_omega{};    ///< d end / d omega
    std::array<double, 2> d_f{};        ///< d end / d f
    double liouville_det = 1.0;         ///< exp(-int Fd'(v) dt)
    double energy_dissipated = 0.0;     ///< int v Fd(v) dt
    double energy_input = 0.0;          ///< int v 2 f cos(w t) dt
    double amplitude = 0.0;             ///< max |x| over the period
};

PeriodMap period_map(const DampingLaw& law, double f, double omega, double x0, double v0,
                     const TimeDomainOptions& opts = {});

struct PeriodicOrbit {
    OscState initial;  ///< state at forcing phase 0
    double omega = 1.0;
    double f = 0.0;
    double period = 0.0;
    std::array<std::complex<double>, 2> multipliers{};
    bool stable = false;
    double amplitude = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool far_from_seed = false;  ///< converged to an orbit unlike the seed
    double liouville_det = 1.0;
    double energy_dissipated = 0.0;
    double energy_input = 0.0;
    std::array<double, 4> monodromy{};

    double multiplier_product() const { return (multipliers[0] * multipliers[1]).real(); }
};

/// Newton iteration on the period map. Throws NumericalError with the final
/// residual when it does not converge in opts.max_iter steps.
PeriodicOrbit shoot(const DampingLaw& law, double f, double omega, const OscState& guess,
                    const TimeDomainOptions& opts = {});

/// Free oscillation (f = 0) limit cycle through (x0, 0); unknowns x0 and the
/// period. One multiplier is the trivial 1, the other decides stability.
PeriodicOrbit limit_cycle(const DampingLaw& law, double x_guess, const TimeDomainOptions& opts = {});

struct ContinuationOptions {
    ContinuationParam param = ContinuationParam::omega;
    double p_min = 0.5;
    double p_max = 1.5;
    double ds = 0.01;
    double ds_min = 1e-6;
    double ds_max = 0.03;
    std::size_t max_steps = 4000;
    double tol_loop = 1e-6;  ///< closure distance relative to the branch extent
    double max_turn = 0.2;  ///< largest accepted angle between consecutive tangents (rad)
    int direction = 1;      ///< initial sign of the parameter increment
    TimeDomainOptions td{};
};

struct OrbitPoint {
    PeriodicOrbit orbit;
    double param = 0.0;
    bool fold = false;            ///< multiplier crossed +1 since the previous point
    bool neimark_sacker = false;  ///< complex pair crossed the unit circle (flag only)
};

enum class Termination { closed_loop, left_range, max_steps, corrector_failed };
const char* to_string(Termination t);

struct OrbitBranch {
    std::vector<OrbitPoint> points;
    ContinuationParam param = ContinuationParam::omega;
    bool closed = false;
    Termination termination = Termination::max_steps;
    std::string diagnostic;

    double min_amplitude() const;
    double max_amplitude() const;
};

OrbitBranch continue_branch(const DampingLaw& law, const PeriodicOrbit& start, const ContinuationOptions& opts = {});

struct BasinWindow {
    double x_min = -1.0;
    double x_max = 1.0;
    double v_min = -1.0;
    double v_max = 1.0;
};

struct BasinOptions {
    double capture_radius = 1e-3;
    std::size_t max_periods = 500;
    unsigned threads = 0;  ///< 0: hardware concurrency
    TimeDomainOptions td{};
};

struct BasinGrid {
    BasinWindow window;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<int> labels;  ///< row-major (v rows, x columns); -1 undecided
    std::vector<PeriodicOrbit> attractors;
    double undecided_fraction = 0.0;

    double x_at(std::size_t i) const;
    double v_at(std::size_t j) const;
    int label(std::size_t i, std::size_t j) const { return labels[j * nx + i]; }
};

/// Label of the stable attractor the trajectory from (x0, v0) is captured by,
/// or -1 after max_periods.
int classify_initial_state(const DampingLaw& law, double f, double omega, const std::vector<PeriodicOrbit>& attractors,
                           double x0, double v0, const BasinOptions& opts = {});

/// Only stable orbits of `orbits` act as attractors. Throws InvalidArgument
/// when none is stable.
BasinGrid basin_grid(const DampingLaw& law, double f, double omega, const std::vector<PeriodicOrbit>& orbits,
                     const BasinWindow& window, std::size_t resolution, const BasinOptions& opts = {});

struct IRCSeed {
    double x_peak = 0.0;
    double omega = 1.0;
    int hb_component = -1;  ///< harmonic-balance component the seed came from
};

/// One seed per isolated branch: its largest-amplitude sample.
std::vector<IRCSeed> seeds_from_trace(const std::vector<ResponseBranch>& branches);

/// Seeds at w = 1: for every target amplitude the nearest solution of
/// |fd(X)| = 2 f, i.e. the harmonic-balance response at resonance.
std::vector<IRCSeed> seeds_at_resonance(const DampingLaw& law, double f, const std::vector<double>& x_targets);

struct LocatedIRC {
    OrbitBranch branch;
    int hb_component = -1;
    std::vector<std::size_t> seeds;  ///< indices of the seeds lying on this loop
};

struct SeedRejection {
    std::size_t seed = 0;
    std::string reason;
};

struct IRCSearch {
    std::vector<LocatedIRC> loops;
    std::vector<SeedRejection> rejected;
};

/// Shoots every seed, continues it in omega and keeps the closed loops.
IRCSearch locate_irc(const DampingLaw& law, double f, const std::vector<IRCSeed>& seeds,
                     const ContinuationOptions& opts = {});

struct MergeSearch {
    double f = 0.0;       ///< bisected merge forcing
    double x_peak = 0.0;      ///< merge amplitude: midpoint of the loop bottom and the orbit across the gap
    double x_loop_min = 0.0;  ///< lowest amplitude of the last closed loop
    double x_across = 0.0;    ///< orbit on the other side of the gap at the loop bottom's frequency
    double f_closed = 0.0;
    double f_merged = 0.0;
    std::size_t iterations = 0;
};

/// Bisection over f for the forcing at which the loop through the seed stops
/// closing. `seed_x(f)` gives the resonant amplitude used to seed at w = 1.
///
/// Just below the merge the loop bottom and the branch it is about to touch
/// straddle the saddle almost symmetrically; their midpoint estimates the
/// merge amplitude. The orbit across the gap is shot from the next lower
/// harmonic-balance amplitude at the same frequency.
/// A loop whose lowest amplitude drops to `min_amplitude_floor` or below counts
/// as merged even when it still closes (two IRCs joined into one).
MergeSearch bisect_irc_merge(const DampingLaw& law, const std::function<double(double)>& seed_x, double f_closed,
                             double f_merged, const ContinuationOptions& opts = {}, double rel_tol = 1e-4,
                             double min_amplitude_floor = 0.0);

/// Replaces the stability of every `stride`-th sample with the shooting verdict.
void annotate_stability(const DampingLaw& law, double f, ResponseBranch& branch, std::size_t stride = 1,
                        const TimeDomainOptions& opts = {});

}  // namespace irc
