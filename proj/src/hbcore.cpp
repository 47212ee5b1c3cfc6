#include "irc/hbcore.hpp"

#include "irc/energybalance.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

namespace irc {

double HBPoint::x_peak() const { return 2.0 * std::sqrt(std::max(A, 0.0)); }
double HBPoint::omega() const { return std::sqrt(Omega); }
double HBPoint::f() const { return std::sqrt(std::max(F, 0.0)); }

// ---------------------------------------------------------------------------
// Printed closed forms

double eval_g(double A, double Omega, double F, const Params& p) {
    const double c1 = p.c1, c3 = p.c3, W = Omega;
    const double A2 = A * A, A3 = A2 * A, A4 = A3 * A, A5 = A4 * A;
    const double W2 = W * W, W3 = W2 * W, W4 = W3 * W, W5 = W4 * W;
    return 100.0 * A5 * W5 + 60.0 * A4 * c3 * W4 + A3 * W3 * (20.0 * c1 + 9.0 * c3 * c3) +
           6.0 * A2 * c1 * c3 * W2 + A * ((c1 * c1 - 2.0) * W + W2 + 1.0) - F;
}

double eval_dg_dA(double A, double Omega, const Params& p) {
    const double c1 = p.c1, c3 = p.c3, W = Omega;
    const double A2 = A * A, A3 = A2 * A, A4 = A3 * A;
    const double W2 = W * W, W3 = W2 * W, W4 = W3 * W, W5 = W4 * W;
    return 500.0 * A4 * W5 + 240.0 * A3 * c3 * W4 + 3.0 * A2 * W3 * (20.0 * c1 + 9.0 * c3 * c3) +
           W2 * (12.0 * A * c1 * c3 + 1.0) + (c1 * c1 - 2.0) * W + 1.0;
}

double eval_dg_dOmega(double A, double Omega, const Params& p) {
    const double c1 = p.c1, c3 = p.c3, W = Omega;
    const double A2 = A * A, A3 = A2 * A, A4 = A3 * A;
    const double W2 = W * W, W3 = W2 * W, W4 = W3 * W;
    return A * (500.0 * A4 * W4 + 240.0 * A3 * c3 * W3 + 27.0 * A2 * c3 * c3 * W2 +
                12.0 * A * c1 * W * (5.0 * A * W + c3) + c1 * c1 + 2.0 * W - 2.0);
}

double eval_d2g_dA2(double A, double Omega, const Params& p) {
    const double c1 = p.c1, c3 = p.c3, W = Omega;
    return 2.0 * W * W *
           (A * W * (1000.0 * A * A * W * W + 360.0 * A * c3 * W + 27.0 * c3 * c3) + 6.0 * c1 * (10.0 * A * W + c3));
}

double eval_hessian_det(double A, double Omega, const Params& p) {
    const double c1 = p.c1, c3 = p.c3, W = Omega;
    const double A2 = A * A, A3 = A2 * A, A4 = A3 * A, A5 = A4 * A, A6 = A5 * A, A7 = A6 * A, A8 = A7 * A;
    const double W2 = W * W, W3 = W2 * W, W4 = W3 * W, W5 = W4 * W, W6 = W5 * W, W7 = W6 * W, W8 = W7 * W;
    const double c1_2 = c1 * c1, c1_3 = c1_2 * c1, c1_4 = c1_3 * c1;
    const double c3_2 = c3 * c3, c3_3 = c3_2 * c3, c3_4 = c3_3 * c3;
    return -2250000.0 * A8 * W8 - 1920000.0 * A7 * c3 * W7 - 592200.0 * A6 * c3_2 * W6 -
           240.0 * A4 * W5 * (324.0 * A * c3_3 + 25.0) - 5.0 * A3 * W4 * (729.0 * A * c3_4 - 2000.0 * A + 480.0 * c3) +
           4.0 * W2 * (81.0 * A2 * c3_2 - 1.0) + 24.0 * A2 * c3 * W3 * (160.0 * A - 9.0 * c3) -
           2.0 * c1_2 * (11500.0 * A4 * W4 + 3840.0 * A3 * c3 * W3 + 297.0 * A2 * c3_2 * W2 + 2.0 * W - 2.0) -
           24.0 * A * c1 * W *
               (c3 * (10200.0 * A4 * W4 + 3.0 * W - 4.0) + 10.0 * A * W * (1750.0 * A4 * W4 + 2.0 * W - 3.0) +
                1875.0 * A3 * c3_2 * W3 + 108.0 * A2 * c3_3 * W2) -
           24.0 * A * c1_3 * W * (15.0 * A * W + 2.0 * c3) - c1_4 + 8.0 * W - 4.0;
}

// ---------------------------------------------------------------------------
// Monomial table

namespace {

struct Monomial {
    double coef;
    int a;  // power of A
    int w;  // power of Omega
};

std::array<Monomial, 7> monomials(const Params& p) {
    const double c1 = p.c1, c3 = p.c3;
    return {{{100.0, 5, 5},
             {60.0 * c3, 4, 4},
             {20.0 * c1 + 9.0 * c3 * c3, 3, 3},
             {6.0 * c1 * c3, 2, 2},
             {c1 * c1 - 2.0, 1, 1},
             {1.0, 1, 2},
             {1.0, 1, 0}}};
}

double falling(int n, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i)
        out *= static_cast<double>(n - i);
    return out;
}

template <class Reduce>
double reduce_partial(double A, double Omega, double F, const Params& p, int nA, int nOmega, Reduce reduce) {
    if (nA < 0 || nOmega < 0)
        throw InvalidArgument("g_partial: negative derivative order");
    double acc = 0.0;
    for (const auto& m : monomials(p)) {
        if (m.a < nA || m.w < nOmega)
            continue;
        const double term =
            m.coef * falling(m.a, nA) * falling(m.w, nOmega) * std::pow(A, m.a - nA) * std::pow(Omega, m.w - nOmega);
        acc = reduce(acc, term);
    }
    if (nA == 0 && nOmega == 0)
        acc = reduce(acc, -F);
    return acc;
}

}  // namespace

double g_partial(double A, double Omega, double F, const Params& p, int nA, int nOmega) {
    return reduce_partial(A, Omega, F, p, nA, nOmega, [](double acc, double t) { return acc + t; });
}

double g_partial_scale(double A, double Omega, double F, const Params& p, int nA, int nOmega) {
    return reduce_partial(A, Omega, F, p, nA, nOmega,
                          [](double acc, double t) { return std::max(acc, std::abs(t)); });
}

double hessian_det_fd(double A, double Omega, const Params& p) {
    auto g = [&](double a, double w) { return eval_g(a, w, 0.0, p); };
    auto estimate = [&](double ha, double hw) {
        const double g0 = g(A, Omega);
        const double gaa = (g(A + ha, Omega) - 2.0 * g0 + g(A - ha, Omega)) / (ha * ha);
        const double gww = (g(A, Omega + hw) - 2.0 * g0 + g(A, Omega - hw)) / (hw * hw);
        const double gaw = (g(A + ha, Omega + hw) - g(A + ha, Omega - hw) - g(A - ha, Omega + hw) +
                            g(A - ha, Omega - hw)) /
                           (4.0 * ha * hw);
        return std::array<double, 3>{gaa, gww, gaw};
    };
    const double ha = 1e-4 * std::max(1.0, std::abs(A));
    const double hw = 1e-4 * std::max(1.0, std::abs(Omega));
    const auto coarse = estimate(ha, hw);
    const auto fine = estimate(0.5 * ha, 0.5 * hw);
    std::array<double, 3> d{};
    for (std::size_t i = 0; i < 3; ++i)
        d[i] = (4.0 * fine[i] - coarse[i]) / 3.0;  // Richardson
    return d[0] * d[1] - d[2] * d[2];
}

CheckedHessian hessian_det_checked(double A, double Omega, const Params& p) {
    CheckedHessian out;
    out.closed_form = eval_hessian_det(A, Omega, p);
    out.finite_difference = hessian_det_fd(A, Omega, p);
    const double saa = g_partial_scale(A, Omega, 0.0, p, 2, 0);
    const double sww = g_partial_scale(A, Omega, 0.0, p, 0, 2);
    const double saw = g_partial_scale(A, Omega, 0.0, p, 1, 1);
    const double scale = std::max({std::abs(out.closed_form), saa * sww + saw * saw, 1e-300});
    out.consistent = std::abs(out.closed_form - out.finite_difference) <= 1e-6 * scale;
    out.value = out.consistent ? out.closed_form : out.finite_difference;
    return out;
}

// ---------------------------------------------------------------------------
// Amplitude roots

AmplitudeRoots solve_amplitudes(double Omega, double F, const Params& p, const RootOptions& opts) {
    validate(p);
    if (!(Omega > 0.0))
        throw InvalidArgument("solve_amplitudes: Omega must be positive");
    if (F < 0.0)
        throw InvalidArgument("solve_amplitudes: F must be nonnegative");

    const double W = Omega;
    const double a5 = 100.0 * std::pow(W, 5);
    const std::array<double, 6> a = {-F,
                                     (p.c1 * p.c1 - 2.0) * W + W * W + 1.0,
                                     6.0 * p.c1 * p.c3 * W * W,
                                     (20.0 * p.c1 + 9.0 * p.c3 * p.c3) * std::pow(W, 3),
                                     60.0 * p.c3 * std::pow(W, 4),
                                     a5};
    Eigen::Matrix<double, 5, 5> companion = Eigen::Matrix<double, 5, 5>::Zero();
    for (int j = 0; j < 5; ++j)
        companion(0, j) = -a[static_cast<std::size_t>(4 - j)] / a5;
    for (int i = 1; i < 5; ++i)
        companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(companion, false);

    AmplitudeRoots out;
    const double tol_res = opts.tol_res * std::max(1.0, F);
    std::vector<double> accepted;
    for (int i = 0; i < 5; ++i) {
        const std::complex<double> z = solver.eigenvalues()[i];
        const double scale = 1.0 + std::abs(z.real());
        if (std::abs(z.imag()) > 1e-5 * scale)
            continue;
        double A = z.real();
        for (int it = 0; it < opts.max_newton; ++it) {
            const double gv = eval_g(A, Omega, F, p);
            const double dg = eval_dg_dA(A, Omega, p);
            if (dg == 0.0 || gv == 0.0)
                break;
            const double step = gv / dg;
            A -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(A)))
                break;
        }
        if (!(std::abs(eval_g(A, Omega, F, p)) <= tol_res)) {
            if (std::abs(z.imag()) <= 1e-8 * scale) {
                out.ill_conditioned = true;
                out.diagnostic = "Newton polishing failed near A = " + std::to_string(z.real());
            }
            continue;
        }
        if (A < -opts.tol_root)
            continue;
        accepted.push_back(std::max(A, 0.0));
    }
    std::sort(accepted.begin(), accepted.end());
    for (double A : accepted) {
        if (out.A.empty() || A - out.A.back() > opts.tol_root * (1.0 + A))
            out.A.push_back(A);
    }
    return out;
}

// ---------------------------------------------------------------------------
// General odd law

double hb_residual(const DampingLaw& law, double x_peak, double omega, double f) {
    const double detune = (1.0 - omega * omega) * x_peak;
    const double fd = averaged_damping(law, std::abs(omega * x_peak));
    return detune * detune + fd * fd - 4.0 * f * f;
}

std::vector<double> hb_amplitudes(const DampingLaw& law, double omega, double f, double x_max, std::size_t grid) {
    if (!(x_max > 0.0) || grid < 2)
        throw InvalidArgument("hb_amplitudes: need x_max > 0 and grid >= 2");
    auto h = [&](double X) { return hb_residual(law, X, omega, f); };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::vector<double> out;
    double x_prev = 0.0, h_prev = h(0.0);
    for (std::size_t i = 1; i <= grid; ++i) {
        const double X = x_max * static_cast<double>(i) / static_cast<double>(grid);
        const double hx = h(X);
        if (hx == 0.0) {
            out.push_back(X);
        } else if ((hx > 0.0) != (h_prev > 0.0) && h_prev != 0.0) {
            std::uintmax_t iters = 200;
            auto [a, b] = boost::math::tools::toms748_solve(h, x_prev, X, h_prev, hx, tol, iters);
            out.push_back(0.5 * (a + b));
        }
        x_prev = X;
        h_prev = hx;
    }
    return out;
}

std::pair<double, double> harmonic_initial_state(const DampingLaw& law, double x_peak, double omega, double f) {
    if (f <= 0.0)
        return {x_peak, 0.0};
    double c = (1.0 - omega * omega) * x_peak;          // 2f cos(phi)
    double s = -averaged_damping(law, omega * x_peak);  // 2f sin(phi)
    const double r = std::hypot(c, s);
    if (r == 0.0)
        return {x_peak, 0.0};
    c /= r;
    s /= r;
    return {x_peak * c, -omega * x_peak * s};
}

const char* to_string(BranchKind kind) { return kind == BranchKind::main ? "main" : "isolated"; }

const char* to_string(Stability s) {
    switch (s) {
    case Stability::unknown: return "unknown";
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    }
    return "?";
}

std::optional<double> amplitude_bound(const DampingLaw& law, double target) {
    target = std::max(target, 0.0);
    switch (law.kind()) {
    case LawKind::quintic: {
        // 5/16 V^5 dominates 3/4 |c3| V^3 once V^2 >= 2.4 |c3|; c1 V > 0.
        const double v1 = std::sqrt(2.4 * std::abs(law.c3()));
        const double v2 = std::pow(3.2 * target, 0.2);
        return 1.01 * std::max(v1, v2) + 1e-9;
    }
    case LawKind::sine_cubic: {
        if (law.c3() == 0.0)
            return std::nullopt;
        constexpr double max_abs_j1 = 0.5818652;
        const double needed = target + 2.0 * std::abs(law.c1()) * max_abs_j1;
        return 1.01 * std::cbrt(needed / (0.75 * std::abs(law.c3()))) + 1e-9;
    }
    case LawKind::table:
        break;
    }
    return std::nullopt;
}

namespace {

struct Node {
    double V;
    int side;  // +1: w < 1, -1: w > 1
    double omega;
    double X;
};

class BalanceCurve {
public:
    BalanceCurve(const DampingLaw& law, double f) : law_(law), f_(f) {}

    double h(double V) const {
        const double d = averaged_damping(law_, V);
        return d * d - 4.0 * f_ * f_;
    }

    Node node(double V, int side) const {
        Node n{V, side, 1.0, V};
        if (V <= 0.0) {
            n.omega = side > 0 ? 0.0 : std::numeric_limits<double>::infinity();
            n.X = side > 0 ? 2.0 * f_ : 0.0;
            return n;
        }
        const double d = averaged_damping(law_, V);
        const double s = std::sqrt(std::max(0.0, 4.0 * f_ * f_ - d * d)) / V;
        // 1/w - w = +-s
        const double lo = 2.0 / (s + std::sqrt(s * s + 4.0));
        n.omega = side > 0 ? lo : 1.0 / lo;
        n.X = V / n.omega;
        return n;
    }

private:
    const DampingLaw& law_;
    double f_;
};

/// Boundaries of {V : fd(V)^2 <= 4 f^2} on (0, v_max].
std::vector<double> component_boundaries(const BalanceCurve& curve, double v_max, std::size_t n) {
    std::vector<double> vs(n + 1), hs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vs[i] = v_max * static_cast<double>(i) / static_cast<double>(n);
        hs[i] = curve.h(vs[i]);
    }
    auto fn = [&](double v) { return curve.h(v); };
    boost::math::tools::eps_tolerance<double> tol(52);
    std::vector<double> roots;
    auto solve = [&](double a, double b, double fa, double fb) {
        if (fa == 0.0) {
            roots.push_back(a);
            return;
        }
        if (fb == 0.0) {
            roots.push_back(b);
            return;
        }
        std::uintmax_t iters = 200;
        auto [lo, hi] = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, iters);
        roots.push_back(0.5 * (lo + hi));
    };
    for (std::size_t i = 0; i < n; ++i) {
        if ((hs[i] > 0.0) != (hs[i + 1] > 0.0))
            solve(vs[i], vs[i + 1], hs[i], hs[i + 1]);
    }
    // Thin excursions through zero that the grid steps over.
    for (std::size_t i = 1; i < n; ++i) {
        const bool dip = hs[i] > 0.0 && hs[i] < hs[i - 1] && hs[i] <= hs[i + 1];
        const bool bump = hs[i] <= 0.0 && hs[i] > hs[i - 1] && hs[i] >= hs[i + 1];
        if (!dip && !bump)
            continue;
        const double sign = dip ? 1.0 : -1.0;
        std::uintmax_t iters = 200;
        auto [vx, val] = boost::math::tools::brent_find_minima([&](double v) { return sign * fn(v); }, vs[i - 1],
                                                               vs[i + 1], 40, iters);
        const double hx = sign * val;
        if ((hx > 0.0) == (hs[i] > 0.0))
            continue;
        solve(vs[i - 1], vx, hs[i - 1], hx);
        solve(vx, vs[i + 1], hx, hs[i + 1]);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() > 1e-13 * (1.0 + r))
            unique.push_back(r);
    return unique;
}

struct Path {
    std::vector<Node> nodes;
    bool closed = false;
};

}  // namespace

std::vector<ResponseBranch> trace_frequency_response(const DampingLaw& law, double f, const TraceOptions& opts) {
    if (f < 0.0)
        throw InvalidArgument("trace_frequency_response: f must be nonnegative");
    if (!(opts.omega_min > 0.0) || !(opts.omega_max > opts.omega_min))
        throw InvalidArgument("trace_frequency_response: invalid frequency window");
    if (opts.samples < 16)
        throw InvalidArgument("trace_frequency_response: too few samples");

    const double v_max = opts.v_max ? *opts.v_max : amplitude_bound(law, 2.0 * f).value_or(40.0);
    const bool bounded = opts.v_max ? false : amplitude_bound(law, 2.0 * f).has_value();
    std::vector<ResponseBranch> out;

    if (f == 0.0) {
        ResponseBranch main;
        main.kind = BranchKind::main;
        const std::size_t n = std::max<std::size_t>(opts.samples / 4, 16);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = opts.omega_min + (opts.omega_max - opts.omega_min) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
            main.samples.push_back({w, 0.0, 0.0, Stability::unknown});
        }
        out.push_back(std::move(main));
        int component = 1;
        for (const auto& ev : predict_irc_events(law, v_max, 4000)) {
            if (ev.kind != EventKind::onset_zero || !(opts.omega_min <= 1.0 && 1.0 <= opts.omega_max))
                continue;
            ResponseBranch point;
            point.kind = BranchKind::isolated;
            point.closed = true;
            point.component = component++;
            point.v_lo = point.v_hi = ev.x0;
            point.samples.push_back({1.0, ev.x0, 0.25 * ev.x0 * ev.x0, Stability::unknown});
            out.push_back(std::move(point));
        }
        return out;
    }

    BalanceCurve curve(law, f);
    const auto roots = component_boundaries(curve, v_max, opts.scan_points);

    // Components as V intervals; the first always starts at V = 0.
    struct Interval {
        double lo, hi;
        bool open;
    };
    std::vector<Interval> intervals;
    intervals.push_back({0.0, roots.empty() ? v_max : roots[0], roots.empty()});
    for (std::size_t i = 1; i < roots.size(); i += 2) {
        if (i + 1 < roots.size())
            intervals.push_back({roots[i], roots[i + 1], false});
        else
            intervals.push_back({roots[i], v_max, true});
    }
    if (!bounded)
        for (auto& iv : intervals)
            if (iv.hi >= v_max)
                iv.open = true;

    const double w_span = opts.omega_max - opts.omega_min;
    const double chord = 4.0 / static_cast<double>(opts.samples);
    auto outside = [&](const Node& n) {
        if (n.omega < opts.omega_min)
            return -1;
        if (n.omega > opts.omega_max)
            return 1;
        return 0;
    };

    for (std::size_t c = 0; c < intervals.size(); ++c) {
        const Interval iv = intervals[c];
        const double x_scale = std::max(iv.hi, 1e-12);
        auto sample_side = [&](int side) {
            const std::size_t n0 = 33;
            std::vector<Node> nodes;
            const double lo = iv.lo == 0.0 ? iv.hi * 1e-9 : iv.lo;
            for (std::size_t i = 0; i < n0; ++i) {
                const double u = static_cast<double>(i) / static_cast<double>(n0 - 1);
                const double V = lo + (iv.hi - lo) * 0.5 * (1.0 - std::cos(std::numbers::pi * u));
                nodes.push_back(curve.node(V, side));
            }
            // Bisect until the normalized chord is short enough inside the window.
            std::vector<Node> refined{nodes.front()};
            std::function<void(const Node&, const Node&, int)> refine = [&](const Node& a, const Node& b, int depth) {
                const int oa = outside(a), ob = outside(b);
                const double dw = (std::min(b.omega, 1e6) - std::min(a.omega, 1e6)) / w_span;
                const double dx = (b.X - a.X) / x_scale;
                if (depth < 40 && !(oa != 0 && oa == ob) && std::hypot(dw, dx) > chord) {
                    const Node m = curve.node(0.5 * (a.V + b.V), side);
                    refine(a, m, depth + 1);
                    refine(m, b, depth + 1);
                    return;
                }
                refined.push_back(b);
            };
            for (std::size_t i = 1; i < nodes.size(); ++i)
                refine(nodes[i - 1], nodes[i], 0);
            return refined;
        };

        auto lower = sample_side(+1);
        auto upper = sample_side(-1);
        std::reverse(upper.begin(), upper.end());
        std::vector<Path> paths;
        if (iv.open) {
            paths.push_back({std::move(lower), false});
            paths.push_back({std::move(upper), false});
        } else {
            Path p;
            p.nodes = std::move(lower);
            p.nodes.insert(p.nodes.end(), upper.begin() + 1, upper.end());
            p.closed = c > 0;
            paths.push_back(std::move(p));
        }

        for (const auto& path : paths) {
            auto to_sample = [](const Node& n) {
                return BranchSample{n.omega, n.X, 0.25 * n.X * n.X, Stability::unknown};
            };
            auto crossing = [&](const Node& a, const Node& b, double w_b) {
                if (a.side != b.side) {
                    const double t = (w_b - a.omega) / (b.omega - a.omega);
                    return Node{a.V + t * (b.V - a.V), a.side, w_b, a.X + t * (b.X - a.X)};
                }
                auto fn = [&](double V) { return curve.node(V, a.side).omega - w_b; };
                boost::math::tools::eps_tolerance<double> tol(50);
                std::uintmax_t iters = 200;
                auto [lo, hi] = boost::math::tools::toms748_solve(fn, std::min(a.V, b.V), std::max(a.V, b.V), tol, iters);
                return curve.node(0.5 * (lo + hi), a.side);
            };

            std::vector<std::vector<BranchSample>> pieces;
            std::vector<BranchSample> current;
            for (std::size_t i = 0; i < path.nodes.size(); ++i) {
                const Node& n = path.nodes[i];
                const bool inside = outside(n) == 0;
                if (i > 0) {
                    const Node& prev = path.nodes[i - 1];
                    const int op = outside(prev), on = outside(n);
                    if (op != on) {
                        if (op != 0)  // entering
                            current.push_back(to_sample(crossing(prev, n, op < 0 ? opts.omega_min : opts.omega_max)));
                        if (on != 0) {  // leaving
                            current.push_back(to_sample(crossing(prev, n, on < 0 ? opts.omega_min : opts.omega_max)));
                            pieces.push_back(std::move(current));
                            current.clear();
                        }
                    }
                }
                if (inside)
                    current.push_back(to_sample(n));
            }
            if (!current.empty())
                pieces.push_back(std::move(current));

            for (auto& piece : pieces) {
                if (piece.size() < 2)
                    continue;
                ResponseBranch b;
                b.samples = std::move(piece);
                b.kind = c == 0 ? BranchKind::main : BranchKind::isolated;
                b.closed = path.closed && pieces.size() == 1;
                b.component = static_cast<int>(c);
                b.v_lo = iv.lo;
                b.v_hi = iv.hi;
                out.push_back(std::move(b));
            }
        }
    }
    return out;
}

std::vector<ResponseBranch> trace_frequency_response(const Params& p, double f, const TraceOptions& opts) {
    return trace_frequency_response(DampingLaw::quintic(p), f, opts);
}

std::size_t count_isolated(const std::vector<ResponseBranch>& branches) {
    std::set<int> components;
    for (const auto& b : branches)
        if (b.kind == BranchKind::isolated)
            components.insert(b.component);
    return components.size();
}

std::size_t omega_reversals(const ResponseBranch& branch) {
    std::size_t count = 0;
    int last = 0;
    for (std::size_t i = 1; i < branch.samples.size(); ++i) {
        const double dw = branch.samples[i].omega - branch.samples[i - 1].omega;
        if (dw == 0.0)
            continue;
        const int dir = dw > 0.0 ? 1 : -1;
        if (last != 0 && dir != last)
            ++count;
        last = dir;
    }
    return count;
}

}  // namespace irc
