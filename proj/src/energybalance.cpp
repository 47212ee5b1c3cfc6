#include "irc/energybalance.hpp"

#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace irc {

namespace {

double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

}  // namespace

double averaged_damping_quadrature(const DampingLaw& law, double x0, double rel_tol) {
    if (x0 < 0.0)
        throw InvalidArgument("averaged_damping: amplitude must be nonnegative");
    if (x0 == 0.0)
        return 0.0;
    auto integrand = [&](double t) {
        const double c = std::cos(t);
        return c * law.force(x0 * c);
    };
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::trapezoidal(integrand, 0.0, 2.0 * std::numbers::pi, rel_tol,
                                                              std::size_t{14}, &error, &l1);
    if (!(error <= 10.0 * rel_tol * std::max(l1, 1e-300)) && error > 1e-15)
        throw NumericalError("averaged_damping: quadrature did not converge at x0 = " + std::to_string(x0));
    return value / std::numbers::pi;
}

double averaged_damping(const DampingLaw& law, double x0) {
    if (x0 < 0.0)
        throw InvalidArgument("averaged_damping: amplitude must be nonnegative");
    if (x0 == 0.0)
        return 0.0;
    const double x2 = x0 * x0;
    switch (law.kind()) {
    case LawKind::quintic:
        return x0 * (law.c1() + x2 * (0.75 * law.c3() + 0.625 * x2));
    case LawKind::sine_cubic:
        return 2.0 * law.c1() * bessel_j1(x0) + 0.75 * law.c3() * x2 * x0;
    case LawKind::table:
        break;
    }
    return averaged_damping_quadrature(law, x0);
}

double averaged_damping_slope(const DampingLaw& law, double x0) {
    const double x2 = x0 * x0;
    switch (law.kind()) {
    case LawKind::quintic:
        return law.c1() + x2 * (2.25 * law.c3() + 3.125 * x2);
    case LawKind::sine_cubic: {
        const double dj1 = x0 == 0.0 ? 0.5 : std::cyl_bessel_j(0.0, x0) - bessel_j1(x0) / x0;
        return 2.0 * law.c1() * dj1 + 2.25 * law.c3() * x2;
    }
    case LawKind::table:
        break;
    }
    auto integrand = [&](double t) {
        const double c = std::cos(t);
        return c * c * law.dforce(x0 * c);
    };
    return boost::math::quadrature::trapezoidal(integrand, 0.0, 2.0 * std::numbers::pi, 1e-12) / std::numbers::pi;
}

AveragedDampingCurve sample_averaged_damping(const DampingLaw& law, double x0_max, std::size_t n) {
    if (!(x0_max > 0.0) || n < 2)
        throw InvalidArgument("sample_averaged_damping: need x0_max > 0 and n >= 2");
    AveragedDampingCurve curve;
    curve.law = law;
    if (law.kind() != LawKind::table)
        curve.closed_form = law.kind();
    curve.x0.reserve(n);
    curve.fd.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x0_max * static_cast<double>(i) / static_cast<double>(n - 1);
        curve.x0.push_back(x);
        curve.fd.push_back(averaged_damping(law, x));
    }
    return curve;
}

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::onset_zero: return "onset_zero";
    case EventKind::onset_min: return "onset_min";
    case EventKind::merge_max: return "merge_max";
    case EventKind::merge_min_between_zeros: return "merge_min_between_zeros";
    }
    return "?";
}

const char* to_string(StabilityHint hint) {
    switch (hint) {
    case StabilityHint::fully_unstable: return "fully_unstable";
    case StabilityHint::upper_branch_stable: return "upper_branch_stable";
    case StabilityHint::none: return "none";
    }
    return "?";
}

std::vector<IRCEvent> curve_events(const std::function<double(double)>& fd,
                                   const std::function<double(double)>& slope, double x0_max, std::size_t resolution) {
    if (!(x0_max > 0.0))
        throw InvalidArgument("curve_events: x0_max must be positive");
    if (resolution == 0)
        resolution = 1000;
    if (resolution < 4)
        throw InvalidArgument("curve_events: resolution too small");

    const double h = x0_max / static_cast<double>(resolution);
    std::vector<double> xs(resolution + 1), fs(resolution + 1);
    for (std::size_t i = 0; i <= resolution; ++i) {
        xs[i] = h * static_cast<double>(i);
        fs[i] = fd(xs[i]);
    }

    std::vector<IRCEvent> events;
    boost::math::tools::eps_tolerance<double> tol(50);

    // Zeros away from the trivial one at x0 = 0.
    for (std::size_t i = 1; i < resolution; ++i) {
        double x = xs[i];
        if (fs[i] != 0.0) {
            if ((fs[i] > 0.0) == (fs[i + 1] > 0.0) || fs[i + 1] == 0.0)
                continue;
            std::uintmax_t iters = 200;
            auto [lo, hi] = boost::math::tools::toms748_solve(fd, xs[i], xs[i + 1], fs[i], fs[i + 1], tol, iters);
            x = 0.5 * (lo + hi);
        }
        IRCEvent ev;
        ev.kind = EventKind::onset_zero;
        ev.x0 = x;
        ev.f = 0.0;
        ev.stability_hint = slope(x) < 0.0 ? StabilityHint::fully_unstable
                                                                 : StabilityHint::upper_branch_stable;
        events.push_back(ev);
    }

    // Extrema from the sampled curve; refined on the neighbouring cells.
    for (std::size_t i = 1; i < resolution; ++i) {
        const bool is_max = fs[i] > fs[i - 1] && fs[i] >= fs[i + 1];
        const bool is_min = fs[i] < fs[i - 1] && fs[i] <= fs[i + 1];
        if (!is_max && !is_min)
            continue;
        // Stationary point from the slope when it brackets, else Brent on fd.
        const double s_lo = slope(xs[i - 1]);
        const double s_hi = slope(xs[i + 1]);
        double x = xs[i];
        if ((s_lo > 0.0) != (s_hi > 0.0) && s_lo != 0.0 && s_hi != 0.0) {
            std::uintmax_t iters = 200;
            auto [lo, hi] = boost::math::tools::toms748_solve(slope, xs[i - 1], xs[i + 1], s_lo, s_hi, tol, iters);
            x = 0.5 * (lo + hi);
        } else {
            const double sign = is_max ? -1.0 : 1.0;
            auto objective = [&](double t) { return sign * fd(t); };
            std::uintmax_t iters = 200;
            x = boost::math::tools::brent_find_minima(objective, xs[i - 1], xs[i + 1], 50, iters).first;
        }
        const double f_at = fd(x);
        IRCEvent ev;
        ev.x0 = x;
        ev.f = 0.5 * std::abs(f_at);
        if (is_max && f_at > 0.0) {
            ev.kind = EventKind::merge_max;
            ev.stability_hint = StabilityHint::none;
        } else if (is_min && f_at < 0.0) {
            ev.kind = EventKind::merge_min_between_zeros;
            ev.stability_hint = StabilityHint::none;
        } else {
            // Local minimum of |fd| away from zero: a birth at positive forcing.
            ev.kind = EventKind::onset_min;
            ev.stability_hint = StabilityHint::upper_branch_stable;
        }
        events.push_back(ev);
    }

    std::sort(events.begin(), events.end(), [](const IRCEvent& a, const IRCEvent& b) { return a.x0 < b.x0; });
    return events;
}

std::vector<IRCEvent> predict_irc_events(const DampingLaw& law, double x0_max, std::size_t resolution) {
    return curve_events([&](double x) { return averaged_damping(law, x); },
                        [&](double x) { return averaged_damping_slope(law, x); }, x0_max, resolution);
}

std::vector<IRCEvent> damping_force_events(const DampingLaw& law, double v_max, std::size_t resolution) {
    return curve_events([&](double v) { return law.force(v); }, [&](double v) { return law.dforce(v); }, v_max,
                        resolution);
}

std::vector<MergeStep> merge_ordering(const std::vector<IRCEvent>& events) {
    std::vector<double> valleys;  // birth amplitudes, valley 0 (main) at x0 = 0
    std::vector<IRCEvent> merges;
    for (const auto& ev : events) {
        if (ev.kind == EventKind::onset_zero || ev.kind == EventKind::onset_min)
            valleys.push_back(ev.x0);
        else
            merges.push_back(ev);
    }
    std::sort(valleys.begin(), valleys.end());
    std::stable_sort(merges.begin(), merges.end(), [](const IRCEvent& a, const IRCEvent& b) {
        return a.f < b.f || (a.f == b.f && a.x0 < b.x0);
    });

    const int n = static_cast<int>(valleys.size());
    std::vector<int> parent(static_cast<std::size_t>(n + 1));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i)
            i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        return i;
    };
    auto members = [&](int root) {
        std::vector<int> out;
        for (int i = 0; i <= n; ++i)
            if (find(i) == root)
                out.push_back(i);
        return out;
    };

    std::vector<MergeStep> steps;
    for (const auto& ev : merges) {
        MergeStep step;
        step.event = ev;
        step.left = static_cast<int>(std::lower_bound(valleys.begin(), valleys.end(), ev.x0) - valleys.begin());
        step.right = step.left + 1 <= n ? step.left + 1 : -1;
        step.left_component = members(find(step.left));
        if (step.right >= 0) {
            step.right_component = members(find(step.right));
            parent[static_cast<std::size_t>(find(step.right))] = find(step.left);
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

std::string merge_label(const MergeStep& step) {
    return std::to_string(step.left) + "-" + (step.right >= 0 ? std::to_string(step.right) : std::string("?"));
}

}  // namespace irc
