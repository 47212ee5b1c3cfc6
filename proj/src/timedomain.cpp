#include "irc/timedomain.hpp"

#include "irc/energybalance.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace irc {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kAmplitudeSamples = 256;

using Plain = std::array<double, 2>;
using Full = std::array<double, 13>;

// State layout of Full: x, v, M (row-major, 4), d/domega (2), d/df (2),
// int Fd'(v) dt, int v Fd(v) dt, int v 2 f cos(w t) dt.
struct FullSystem {
    const DampingLaw& law;
    double f;
    double omega;

    void operator()(const Full& s, Full& ds, double tau) const {
        const double w = 1.0 / omega;
        const double x = s[0], v = s[1];
        const double forcing = 2.0 * f * std::cos(tau);
        const double fd = law.force(v);
        const double dfd = law.dforce(v);
        ds[0] = v * w;
        ds[1] = (forcing - x - fd) * w;
        // J = [[0, w], [-w, -dfd w]]
        for (int c = 0; c < 2; ++c) {
            const double m0 = s[2 + c], m1 = s[4 + c];
            ds[2 + c] = w * m1;
            ds[4 + c] = -w * m0 - dfd * w * m1;
        }
        ds[6] = w * s[7] - w * ds[0];
        ds[7] = -w * s[6] - dfd * w * s[7] - w * ds[1];
        ds[8] = w * s[9];
        ds[9] = -w * s[8] - dfd * w * s[9] + 2.0 * std::cos(tau) * w;
        ds[10] = dfd * w;
        ds[11] = v * fd * w;
        ds[12] = v * forcing * w;
    }
};

struct PlainSystem {
    const DampingLaw& law;
    double f;
    double omega;

    void operator()(const Plain& s, Plain& ds, double tau) const {
        const double w = 1.0 / omega;
        ds[0] = s[1] * w;
        ds[1] = (2.0 * f * std::cos(tau) - s[0] - law.force(s[1])) * w;
    }
};

template <class State, class System, class Observer>
void run(System sys, State& s, const std::vector<double>& taus, const TimeDomainOptions& opts, Observer obs) {
    auto stepper = odeint::make_dense_output(opts.abs_ode, opts.tol_ode, odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_times(stepper, sys, s, taus.begin(), taus.end(), 1e-2, obs,
                                odeint::max_step_checker(100000));
    } catch (const std::exception& e) {
        throw NumericalError(std::string("integrator failure (step-size collapse): ") + e.what());
    }
    for (double c : s)
        if (!std::isfinite(c))
            throw NumericalError("integrator produced a non-finite state");
}

void check_forcing(double f, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw InvalidArgument("forcing frequency must be positive");
    if (!(f >= 0.0) || !std::isfinite(f))
        throw InvalidArgument("forcing amplitude must be nonnegative");
}

/// Peak of |x| from equally spaced samples, refined by a parabola through the
/// largest sample and its neighbours (periodic).
double peak_abs(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(xs[i]) > std::abs(xs[k]))
            k = i;
    const double a = std::abs(xs[(k + n - 1) % n]), b = std::abs(xs[k]), c = std::abs(xs[(k + 1) % n]);
    const double denom = a - 2.0 * b + c;
    if (denom >= 0.0)
        return b;
    const double d = 0.5 * (a - c) / denom;
    return b - 0.25 * (a - c) * d;
}

std::array<std::complex<double>, 2> eigen2(const std::array<double, 4>& m) {
    const double tr = m[0] + m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * tr * tr - det, 0.0));
    return {0.5 * tr + disc, 0.5 * tr - disc};
}

double spectral_radius(const std::array<std::complex<double>, 2>& mu) {
    return std::max(std::abs(mu[0]), std::abs(mu[1]));
}

void fill_orbit(PeriodicOrbit& o, const PeriodMap& pm, const TimeDomainOptions& opts) {
    o.period = kTwoPi / o.omega;
    o.monodromy = pm.monodromy;
    o.multipliers = eigen2(pm.monodromy);
    o.stable = spectral_radius(o.multipliers) < 1.0 - opts.tol_stab;
    o.amplitude = pm.amplitude;
    o.liouville_det = pm.liouville_det;
    o.energy_dissipated = pm.energy_dissipated;
    o.energy_input = pm.energy_input;
}

double det_minus_identity(const std::array<double, 4>& m) { return (m[0] - 1.0) * (m[3] - 1.0) - m[1] * m[2]; }

}  // namespace

const char* to_string(ContinuationParam p) { return p == ContinuationParam::omega ? "omega" : "f"; }

const char* to_string(Termination t) {
    switch (t) {
    case Termination::closed_loop: return "closed_loop";
    case Termination::left_range: return "left_range";
    case Termination::max_steps: return "max_steps";
    case Termination::corrector_failed: return "corrector_failed";
    }
    return "?";
}

Trajectory integrate(const DampingLaw& law, double f, double omega, const OscState& initial, double n_periods,
                     std::size_t samples_per_period, const TimeDomainOptions& opts) {
    check_forcing(f, omega);
    if (!std::isfinite(initial.x) || !std::isfinite(initial.v) || !std::isfinite(initial.t))
        throw InvalidArgument("integrate: initial state must be finite");
    if (!(n_periods > 0.0) || samples_per_period == 0)
        throw InvalidArgument("integrate: need n_periods > 0 and samples_per_period > 0");

    const auto n = static_cast<std::size_t>(std::ceil(n_periods * static_cast<double>(samples_per_period)));
    const double tau0 = omega * initial.t;
    const double dtau = kTwoPi * n_periods / static_cast<double>(n);
    std::vector<double> taus(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        taus[i] = tau0 + dtau * static_cast<double>(i);

    Trajectory tr;
    tr.t.reserve(n + 1);
    tr.x.reserve(n + 1);
    tr.v.reserve(n + 1);
    Plain s{initial.x, initial.v};
    run(PlainSystem{law, f, omega}, s, taus, opts, [&](const Plain& st, double tau) {
        tr.t.push_back(tau / omega);
        tr.x.push_back(st[0]);
        tr.v.push_back(st[1]);
    });
    return tr;
}

std::vector<std::array<double, 2>> poincare_iterates(const DampingLaw& law, double f, double omega, double x0,
                                                     double v0, std::size_t n_periods, const TimeDomainOptions& opts) {
    check_forcing(f, omega);
    std::vector<double> taus(n_periods + 1);
    for (std::size_t i = 0; i <= n_periods; ++i)
        taus[i] = kTwoPi * static_cast<double>(i);
    std::vector<std::array<double, 2>> out;
    out.reserve(n_periods + 1);
    Plain s{x0, v0};
    run(PlainSystem{law, f, omega}, s, taus, opts, [&](const Plain& st, double) { out.push_back(st); });
    return out;
}

PeriodMap period_map(const DampingLaw& law, double f, double omega, double x0, double v0,
                     const TimeDomainOptions& opts) {
    check_forcing(f, omega);
    std::vector<double> taus(kAmplitudeSamples + 1);
    for (std::size_t i = 0; i <= kAmplitudeSamples; ++i)
        taus[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(kAmplitudeSamples);
    taus.back() = kTwoPi;

    Full s{};
    s[0] = x0;
    s[1] = v0;
    s[2] = 1.0;
    s[5] = 1.0;
    std::vector<double> xs;
    xs.reserve(kAmplitudeSamples + 1);
    run(FullSystem{law, f, omega}, s, taus, opts, [&](const Full& st, double) { xs.push_back(st[0]); });
    xs.pop_back();  // the end point repeats the start of the next period

    PeriodMap pm;
    pm.end = {s[0], s[1]};
    pm.monodromy = {s[2], s[3], s[4], s[5]};
    pm.d_omega = {s[6], s[7]};
    pm.d_f = {s[8], s[9]};
    pm.liouville_det = std::exp(-s[10]);
    pm.energy_dissipated = s[11];
    pm.energy_input = s[12];
    pm.amplitude = peak_abs(xs);
    return pm;
}

PeriodicOrbit shoot(const DampingLaw& law, double f, double omega, const OscState& guess,
                    const TimeDomainOptions& opts) {
    check_forcing(f, omega);
    if (!std::isfinite(guess.x) || !std::isfinite(guess.v) || !std::isfinite(guess.t))
        throw InvalidArgument("shoot: guess must be finite");

    double x = guess.x, v = guess.v;
    // Bring a guess given at another phase to the section t = 0 mod T.
    const double phase = std::fmod(omega * guess.t, kTwoPi);
    if (phase != 0.0) {
        const auto tr = integrate(law, f, omega, guess, (kTwoPi - phase) / kTwoPi, 1, opts);
        x = tr.x.back();
        v = tr.v.back();
    }
    const double seed_amp = std::hypot(guess.x, guess.v / omega);

    PeriodicOrbit orbit;
    orbit.omega = omega;
    orbit.f = f;
    double residual = std::numeric_limits<double>::infinity();
    int polish = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        const PeriodMap pm = period_map(law, f, omega, x, v, opts);
        const double rx = pm.end[0] - x, rv = pm.end[1] - v;
        residual = std::hypot(rx, rv);
        Eigen::Matrix2d J;
        J << pm.monodromy[0] - 1.0, pm.monodromy[1], pm.monodromy[2], pm.monodromy[3] - 1.0;
        Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(-rx, -rv));
        const double scale = 1.0 + std::hypot(x, v);
        if (residual <= opts.tol_shoot * scale) {
            // A couple of extra Newton steps tighten the fixed point well below
            // the acceptance threshold; continuation closure relies on this.
            if (polish >= 2 || !step.allFinite() || step.norm() <= 1e-13 * scale) {
                orbit.initial = {x, v, 0.0};
                orbit.residual = residual;
                orbit.iterations = it;
                fill_orbit(orbit, pm, opts);
                orbit.far_from_seed = std::abs(orbit.amplitude - seed_amp) >
                                      0.1 * std::max({seed_amp, orbit.amplitude, 1e-3});
                return orbit;
            }
            ++polish;
        }
        if (!step.allFinite())
            break;
        const double cap = 0.5 * scale;
        if (step.norm() > cap)
            step *= cap / step.norm();
        x += step[0];
        v += step[1];
    }
    throw NumericalError("shoot: Newton did not converge (final residual " + std::to_string(residual) + ")");
}

PeriodicOrbit limit_cycle(const DampingLaw& law, double x_guess, const TimeDomainOptions& opts) {
    if (!(x_guess > 0.0) || !std::isfinite(x_guess))
        throw InvalidArgument("limit_cycle: amplitude guess must be positive");
    double x = x_guess, omega = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    int polish = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        const PeriodMap pm = period_map(law, 0.0, omega, x, 0.0, opts);
        const double rx = pm.end[0] - x, rv = pm.end[1];
        residual = std::hypot(rx, rv);
        Eigen::Matrix2d J;
        J << pm.monodromy[0] - 1.0, pm.d_omega[0], pm.monodromy[2], pm.d_omega[1];
        Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(-rx, -rv));
        const double scale = 1.0 + std::abs(x);
        if (residual <= opts.tol_shoot * scale && (polish >= 2 || step.norm() <= 1e-13 * scale)) {
            if (pm.amplitude < 1e-6)
                throw NumericalError("limit_cycle: converged to the equilibrium");
            PeriodicOrbit orbit;
            orbit.initial = {x, 0.0, 0.0};
            orbit.omega = omega;
            orbit.f = 0.0;
            orbit.residual = residual;
            orbit.iterations = it;
            fill_orbit(orbit, pm, opts);
            // The phase direction gives the trivial multiplier 1.
            const double other = pm.monodromy[0] * pm.monodromy[3] - pm.monodromy[1] * pm.monodromy[2];
            orbit.multipliers = {std::complex<double>(1.0, 0.0), std::complex<double>(other, 0.0)};
            orbit.stable = std::abs(other) < 1.0 - opts.tol_stab;
            orbit.far_from_seed = std::abs(orbit.amplitude - x_guess) > 0.1 * std::max(x_guess, orbit.amplitude);
            return orbit;
        }
        if (residual <= opts.tol_shoot * scale)
            ++polish;
        if (!step.allFinite())
            break;
        const double cap = 0.25 * scale;
        if (step.norm() > cap)
            step *= cap / step.norm();
        x += step[0];
        omega += step[1];
        if (!(omega > 0.0))
            break;
    }
    throw NumericalError("limit_cycle: Newton did not converge (final residual " + std::to_string(residual) + ")");
}

double OrbitBranch::min_amplitude() const {
    double out = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
        out = std::min(out, p.orbit.amplitude);
    return out;
}

double OrbitBranch::max_amplitude() const {
    double out = 0.0;
    for (const auto& p : points)
        out = std::max(out, p.orbit.amplitude);
    return out;
}

namespace {

struct ContinuationContext {
    const DampingLaw& law;
    const PeriodicOrbit& start;
    const ContinuationOptions& opts;

    double omega(const Eigen::Vector3d& y) const { return opts.param == ContinuationParam::omega ? y[2] : start.omega; }
    double force(const Eigen::Vector3d& y) const { return opts.param == ContinuationParam::f ? y[2] : start.f; }

    PeriodMap eval(const Eigen::Vector3d& y) const {
        return period_map(law, force(y), omega(y), y[0], y[1], opts.td);
    }

    static Eigen::Matrix<double, 2, 3> jacobian(const PeriodMap& pm, ContinuationParam param) {
        const auto& dp = param == ContinuationParam::omega ? pm.d_omega : pm.d_f;
        Eigen::Matrix<double, 2, 3> J;
        J << pm.monodromy[0] - 1.0, pm.monodromy[1], dp[0], pm.monodromy[2], pm.monodromy[3] - 1.0, dp[1];
        return J;
    }

    static Eigen::Vector3d tangent(const Eigen::Matrix<double, 2, 3>& J) {
        Eigen::Vector3d t = Eigen::Vector3d(J.row(0).transpose()).cross(Eigen::Vector3d(J.row(1).transpose()));
        return t.normalized();
    }

    /// Newton on {G(y) = 0, n . (y - anchor) = 0}; returns the period map at the
    /// solution.
    std::optional<PeriodMap> correct(Eigen::Vector3d& y, const Eigen::Vector3d& anchor, const Eigen::Vector3d& n,
                                     int& iters) const {
        for (iters = 0; iters < 10; ++iters) {
            if ((opts.param == ContinuationParam::omega && !(y[2] > 0.0)) ||
                (opts.param == ContinuationParam::f && !(y[2] >= 0.0)))
                return std::nullopt;
            PeriodMap pm;
            try {
                pm = eval(y);
            } catch (const NumericalError&) {
                return std::nullopt;
            }
            const Eigen::Vector2d G(pm.end[0] - y[0], pm.end[1] - y[1]);
            Eigen::Matrix3d M;
            M.topRows<2>() = jacobian(pm, opts.param);
            M.row(2) = n.transpose();
            Eigen::Vector3d rhs;
            rhs << G, n.dot(y - anchor);
            const Eigen::Vector3d dy = M.fullPivLu().solve(rhs);
            if (!dy.allFinite())
                return std::nullopt;
            const double scale = 1.0 + y.norm();
            if (G.norm() <= opts.td.tol_shoot * scale && dy.norm() <= 1e-11 * scale)
                return pm;
            y -= dy;
        }
        return std::nullopt;
    }
};

OrbitPoint make_point(const Eigen::Vector3d& y, const PeriodMap& pm, const ContinuationContext& ctx) {
    OrbitPoint p;
    p.orbit.initial = {y[0], y[1], 0.0};
    p.orbit.omega = ctx.omega(y);
    p.orbit.f = ctx.force(y);
    p.orbit.residual = std::hypot(pm.end[0] - y[0], pm.end[1] - y[1]);
    fill_orbit(p.orbit, pm, ctx.opts.td);
    p.param = y[2];
    return p;
}

}  // namespace

OrbitBranch continue_branch(const DampingLaw& law, const PeriodicOrbit& start, const ContinuationOptions& opts) {
    if (!(opts.p_max > opts.p_min) || !(opts.ds > 0.0) || !(opts.ds_min > 0.0) || !(opts.ds_max >= opts.ds_min))
        throw InvalidArgument("continue_branch: invalid range or step sizes");
    if (!(opts.tol_loop > 0.0))
        throw InvalidArgument("continue_branch: tol_loop must be positive");
    ContinuationContext ctx{law, start, opts};

    OrbitBranch branch;
    branch.param = opts.param;
    const double p0 = opts.param == ContinuationParam::omega ? start.omega : start.f;
    const Eigen::Vector3d y_start(start.initial.x, start.initial.v, p0);

    Eigen::Vector3d y = y_start;
    PeriodMap pm = ctx.eval(y);
    if (std::hypot(pm.end[0] - y[0], pm.end[1] - y[1]) > 1e3 * opts.td.tol_shoot * (1.0 + y.norm()))
        throw InvalidArgument("continue_branch: start orbit is not converged");
    branch.points.push_back(make_point(y, pm, ctx));

    Eigen::Vector3d t = ContinuationContext::tangent(ContinuationContext::jacobian(pm, opts.param));
    if (t[2] * static_cast<double>(opts.direction >= 0 ? 1 : -1) < 0.0)
        t = -t;

    Eigen::Vector3d lo = y, hi = y;
    double ds = opts.ds;
    double farthest = 0.0;

    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        // Closure: once the branch has moved away and comes back, correct onto
        // the hyperplane through the start point and compare.
        const Eigen::Vector3d to_start = y_start - y;
        const double ahead = t.dot(to_start);
        if (farthest > 4.0 * opts.ds_max && to_start.norm() < 1.5 * ds && ahead > 0.0) {
            Eigen::Vector3d z = y + ahead * t;
            int iters = 0;
            if (auto pmz = ctx.correct(z, y_start, t, iters)) {
                const double extent = std::max((hi - lo).norm(), 1e-12);
                if ((z - y_start).norm() <= opts.tol_loop * extent) {
                    branch.closed = true;
                    branch.termination = Termination::closed_loop;
                    return branch;
                }
            }
        }

        Eigen::Vector3d y_new = y + ds * t;
        int iters = 0;
        auto pm_new = ctx.correct(y_new, y + ds * t, t, iters);
        bool ok = pm_new.has_value() && (y_new - (y + ds * t)).norm() <= 0.5 * ds;
        Eigen::Vector3d t_new;
        if (ok) {
            t_new = ContinuationContext::tangent(ContinuationContext::jacobian(*pm_new, opts.param));
            if (t_new.dot(t) < 0.0)
                t_new = -t_new;
            ok = std::acos(std::clamp(t_new.dot(t), -1.0, 1.0)) <= opts.max_turn;
        }
        if (!ok) {
            ds *= 0.5;
            if (ds < opts.ds_min) {
                branch.termination = Termination::corrector_failed;
                branch.diagnostic = "corrector failed at " + std::string(to_string(opts.param)) + " = " +
                                    std::to_string(y[2]) + " with minimum step";
                return branch;
            }
            continue;
        }

        OrbitPoint pt = make_point(y_new, *pm_new, ctx);
        const auto& prev = branch.points.back().orbit;
        pt.fold = (det_minus_identity(prev.monodromy) > 0.0) != (det_minus_identity(pt.orbit.monodromy) > 0.0);
        const bool complex_prev = prev.multipliers[0].imag() != 0.0;
        const bool complex_now = pt.orbit.multipliers[0].imag() != 0.0;
        pt.neimark_sacker = complex_prev && complex_now &&
                            ((prev.multiplier_product() > 1.0) != (pt.orbit.multiplier_product() > 1.0));
        branch.points.push_back(pt);

        y = y_new;
        t = t_new;
        lo = lo.cwiseMin(y);
        hi = hi.cwiseMax(y);
        farthest = std::max(farthest, (y - y_start).norm());

        if (y[2] < opts.p_min || y[2] > opts.p_max) {
            branch.termination = Termination::left_range;
            branch.diagnostic = std::string(to_string(opts.param)) + " left [" + std::to_string(opts.p_min) + ", " +
                                std::to_string(opts.p_max) + "]";
            return branch;
        }
        if (iters <= 3)
            ds = std::min(1.3 * ds, opts.ds_max);
        else if (iters >= 6)
            ds = std::max(0.5 * ds, opts.ds_min);
    }
    branch.termination = Termination::max_steps;
    branch.diagnostic = "step limit reached";
    return branch;
}

// ---------------------------------------------------------------------------
// Basins

double BasinGrid::x_at(std::size_t i) const {
    return nx < 2 ? 0.5 * (window.x_min + window.x_max)
                  : window.x_min + (window.x_max - window.x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double BasinGrid::v_at(std::size_t j) const {
    return ny < 2 ? 0.5 * (window.v_min + window.v_max)
                  : window.v_min + (window.v_max - window.v_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

int classify_initial_state(const DampingLaw& law, double f, double omega, const std::vector<PeriodicOrbit>& attractors,
                           double x0, double v0, const BasinOptions& opts) {
    check_forcing(f, omega);
    auto captured = [&](const Plain& s) {
        for (std::size_t k = 0; k < attractors.size(); ++k)
            if (std::hypot(s[0] - attractors[k].initial.x, s[1] - attractors[k].initial.v) <= opts.capture_radius)
                return static_cast<int>(k);
        return -1;
    };
    Plain s{x0, v0};
    if (int k = captured(s); k >= 0)
        return k;
    const std::vector<double> taus{0.0, kTwoPi};
    for (std::size_t n = 0; n < opts.max_periods; ++n) {
        run(PlainSystem{law, f, omega}, s, taus, opts.td, [](const Plain&, double) {});
        if (int k = captured(s); k >= 0)
            return k;
    }
    return -1;
}

BasinGrid basin_grid(const DampingLaw& law, double f, double omega, const std::vector<PeriodicOrbit>& orbits,
                     const BasinWindow& window, std::size_t resolution, const BasinOptions& opts) {
    check_forcing(f, omega);
    if (!(window.x_max > window.x_min) || !(window.v_max > window.v_min) || resolution < 2)
        throw InvalidArgument("basin_grid: window must be nonempty and resolution >= 2");
    if (!(opts.capture_radius > 0.0))
        throw InvalidArgument("basin_grid: capture radius must be positive");

    BasinGrid grid;
    grid.window = window;
    grid.nx = grid.ny = resolution;
    for (const auto& o : orbits)
        if (o.stable)
            grid.attractors.push_back(o);
    if (grid.attractors.empty())
        throw InvalidArgument("basin_grid: no stable attractor given");
    grid.labels.assign(grid.nx * grid.ny, -1);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t cell = next++; cell < grid.labels.size(); cell = next++) {
            const std::size_t i = cell % grid.nx, j = cell / grid.nx;
            try {
                grid.labels[cell] = classify_initial_state(law, f, omega, grid.attractors, grid.x_at(i), grid.v_at(j), opts);
            } catch (const NumericalError&) {
                grid.labels[cell] = -1;
            }
        }
    };
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.labels.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    const auto undecided = std::count(grid.labels.begin(), grid.labels.end(), -1);
    grid.undecided_fraction = static_cast<double>(undecided) / static_cast<double>(grid.labels.size());
    return grid;
}

// ---------------------------------------------------------------------------
// IRC search

std::vector<IRCSeed> seeds_from_trace(const std::vector<ResponseBranch>& branches) {
    std::vector<IRCSeed> out;
    for (const auto& b : branches) {
        if (b.kind != BranchKind::isolated || b.samples.empty())
            continue;
        const auto top = std::max_element(b.samples.begin(), b.samples.end(),
                                          [](const BranchSample& a, const BranchSample& c) { return a.x_peak < c.x_peak; });
        const bool dup = std::any_of(out.begin(), out.end(), [&](const IRCSeed& s) { return s.hb_component == b.component; });
        if (!dup)
            out.push_back({top->x_peak, top->omega, b.component});
    }
    return out;
}

std::vector<IRCSeed> seeds_at_resonance(const DampingLaw& law, double f, const std::vector<double>& x_targets) {
    if (x_targets.empty())
        return {};
    const double x_max = 1.5 * *std::max_element(x_targets.begin(), x_targets.end()) + 0.1;
    const std::size_t n = 8000;
    std::vector<double> roots;
    boost::math::tools::eps_tolerance<double> tol(50);
    for (double sign : {1.0, -1.0}) {
        auto h = [&](double x) { return averaged_damping(law, x) - sign * 2.0 * f; };
        double x_prev = x_max / static_cast<double>(n), h_prev = h(x_prev);
        for (std::size_t i = 2; i <= n; ++i) {
            const double x = x_max * static_cast<double>(i) / static_cast<double>(n);
            const double hx = h(x);
            if ((hx > 0.0) != (h_prev > 0.0)) {
                std::uintmax_t iters = 200;
                auto [a, b] = boost::math::tools::toms748_solve(h, x_prev, x, h_prev, hx, tol, iters);
                roots.push_back(0.5 * (a + b));
            }
            x_prev = x;
            h_prev = hx;
        }
    }
    std::vector<IRCSeed> out;
    for (double target : x_targets) {
        double best = target;
        for (double r : roots)
            if (best == target || std::abs(r - target) < std::abs(best - target))
                best = r;
        out.push_back({best, 1.0, -1});
    }
    return out;
}

namespace {

double distance_to_branch(const OrbitBranch& b, const Eigen::Vector3d& q) {
    double best = std::numeric_limits<double>::infinity();
    auto point = [](const OrbitPoint& p) { return Eigen::Vector3d(p.orbit.initial.x, p.orbit.initial.v, p.param); };
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const Eigen::Vector3d a = point(b.points[i]);
        const Eigen::Vector3d c = point(b.points[(i + 1) % b.points.size()]);
        const Eigen::Vector3d d = c - a;
        const double len2 = d.squaredNorm();
        const double s = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (q - (a + s * d)).norm());
    }
    return best;
}

}  // namespace

IRCSearch locate_irc(const DampingLaw& law, double f, const std::vector<IRCSeed>& seeds,
                     const ContinuationOptions& opts) {
    ContinuationOptions copts = opts;
    copts.param = ContinuationParam::omega;
    IRCSearch out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& seed = seeds[i];
        PeriodicOrbit orbit;
        try {
            const auto [x0, v0] = harmonic_initial_state(law, seed.x_peak, seed.omega, f);
            orbit = shoot(law, f, seed.omega, {x0, v0, 0.0}, copts.td);
        } catch (const std::exception& e) {
            out.rejected.push_back({i, std::string("shooting failed: ") + e.what()});
            continue;
        }
        const Eigen::Vector3d q(orbit.initial.x, orbit.initial.v, orbit.omega);
        bool attached = false;
        for (auto& loop : out.loops) {
            if (distance_to_branch(loop.branch, q) <= 2.0 * copts.ds_max) {
                loop.seeds.push_back(i);
                attached = true;
                break;
            }
        }
        if (attached)
            continue;
        OrbitBranch branch;
        try {
            branch = continue_branch(law, orbit, copts);
        } catch (const std::exception& e) {
            out.rejected.push_back({i, std::string("continuation failed: ") + e.what()});
            continue;
        }
        if (!branch.closed) {
            out.rejected.push_back({i, branch.termination == Termination::left_range
                                           ? "branch is not isolated (" + branch.diagnostic + ")"
                                           : "branch did not close: " + branch.diagnostic});
            continue;
        }
        out.loops.push_back({std::move(branch), seed.hb_component, {i}});
    }
    return out;
}

MergeSearch bisect_irc_merge(const DampingLaw& law, const std::function<double(double)>& seed_x, double f_closed,
                             double f_merged, const ContinuationOptions& opts, double rel_tol,
                             double min_amplitude_floor) {
    if (!(f_closed >= 0.0) || !(f_merged >= 0.0) || f_closed == f_merged || !(rel_tol > 0.0))
        throw InvalidArgument("bisect_irc_merge: invalid forcing bracket");
    ContinuationOptions copts = opts;
    copts.param = ContinuationParam::omega;

    auto loop_at = [&](double f) -> std::optional<OrbitBranch> {
        const double x = seed_x(f);
        const auto [x0, v0] = harmonic_initial_state(law, x, 1.0, f);
        PeriodicOrbit orbit;
        try {
            orbit = shoot(law, f, 1.0, {x0, v0, 0.0}, copts.td);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
        auto b = continue_branch(law, orbit, copts);
        if (!b.closed || b.min_amplitude() <= min_amplitude_floor)
            return std::nullopt;
        return b;
    };

    MergeSearch out;
    auto closed = loop_at(f_closed);
    if (!closed)
        throw NumericalError("bisect_irc_merge: no closed loop at the lower forcing");
    if (loop_at(f_merged))
        throw NumericalError("bisect_irc_merge: loop still closed at the upper forcing");
    double lo = f_closed, hi = f_merged;
    OrbitBranch last = std::move(*closed);
    while (std::abs(hi - lo) > rel_tol * std::max(std::abs(lo), std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (auto b = loop_at(mid)) {
            lo = mid;
            last = std::move(*b);
        } else {
            hi = mid;
        }
        ++out.iterations;
    }
    out.f_closed = lo;
    out.f_merged = hi;
    out.f = 0.5 * (lo + hi);
    out.x_loop_min = last.min_amplitude();
    out.x_peak = out.x_loop_min;
    out.x_across = std::numeric_limits<double>::quiet_NaN();
    const auto& bottom = *std::min_element(last.points.begin(), last.points.end(), [](const auto& a, const auto& b) {
        return a.orbit.amplitude < b.orbit.amplitude;
    });
    const double w = bottom.param;
    auto below = hb_amplitudes(law, w, lo, out.x_loop_min);
    std::reverse(below.begin(), below.end());
    for (double X : below) {
        try {
            const auto [x0, v0] = harmonic_initial_state(law, X, w, lo);
            const auto orbit = shoot(law, lo, w, {x0, v0, 0.0}, copts.td);
            if (orbit.amplitude < out.x_loop_min * (1.0 - 1e-4)) {
                out.x_across = orbit.amplitude;
                out.x_peak = 0.5 * (out.x_loop_min + orbit.amplitude);
                break;
            }
        } catch (const NumericalError&) {
        }
    }
    return out;
}

void annotate_stability(const DampingLaw& law, double f, ResponseBranch& branch, std::size_t stride,
                        const TimeDomainOptions& opts) {
    if (stride == 0)
        throw InvalidArgument("annotate_stability: stride must be positive");
    for (std::size_t i = 0; i < branch.samples.size(); i += stride) {
        auto& s = branch.samples[i];
        try {
            const auto [x0, v0] = harmonic_initial_state(law, s.x_peak, s.omega, f);
            const auto orbit = shoot(law, f, s.omega, {x0, v0, 0.0}, opts);
            s.stability = orbit.far_from_seed ? Stability::unknown
                                              : (orbit.stable ? Stability::stable : Stability::unstable);
        } catch (const NumericalError&) {
            s.stability = Stability::unknown;
        }
    }
}

}  // namespace irc
