#include "irc/singularity.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace irc {

const char* to_string(SingularityKind kind) {
    switch (kind) {
    case SingularityKind::regular: return "regular";
    case SingularityKind::fold: return "fold";
    case SingularityKind::isola: return "isola";
    case SingularityKind::simple_bifurcation: return "simple_bifurcation";
    case SingularityKind::hysteresis: return "hysteresis";
    case SingularityKind::winged_cusp: return "winged_cusp";
    case SingularityKind::high_codim: return "high_codim";
    }
    return "?";
}

const char* to_string(SingularLabel label) {
    switch (label) {
    case SingularLabel::S1: return "S1";
    case SingularLabel::S2: return "S2";
    case SingularLabel::S3: return "S3";
    case SingularLabel::S4: return "S4";
    case SingularLabel::numeric: return "numeric";
    }
    return "?";
}

Thresholds thresholds(double c1) {
    if (!(c1 > 0.0))
        throw InvalidArgument("thresholds: c1 must be positive");
    return {-(2.0 / 3.0) * std::sqrt(10.0 * c1), -(10.0 / 9.0) * std::sqrt(2.0 * c1)};
}

int zone(const Params& p) {
    validate(p);
    const auto t = thresholds(p.c1);
    if (p.c3 > t.c32)
        return 1;
    if (p.c3 > t.c31)
        return 2;
    return 3;
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }

SingularPoint make_point(SingularLabel label, SingularityKind kind, double A, double F, const Params& p) {
    SingularPoint s;
    s.label = label;
    s.kind = kind;
    s.A = std::max(A, 0.0);
    s.Omega = 1.0;
    s.F = std::max(F, 0.0);
    s.hessian_det = eval_hessian_det(s.A, 1.0, p);
    return s;
}

}  // namespace

std::vector<SingularPoint> closed_form_singularities(const Params& p) {
    validate(p);
    const auto t = thresholds(p.c1);
    const double c1 = p.c1, c3 = p.c3;
    std::vector<SingularPoint> out;

    const bool at_c31 = near(c3, t.c31);
    const bool at_c32 = near(c3, t.c32);

    if (c3 <= t.c31 || at_c31) {
        const double root = std::sqrt(std::max(0.0, 9.0 * c3 * c3 - 40.0 * c1));
        const auto kind = at_c31 ? SingularityKind::high_codim : SingularityKind::isola;
        out.push_back(make_point(SingularLabel::S1, kind, (-3.0 * c3 - root) / 20.0, 0.0, p));
        out.push_back(make_point(SingularLabel::S2, kind, (-3.0 * c3 + root) / 20.0, 0.0, p));
    }
    if (c3 <= t.c32 || at_c32) {
        const double root = std::sqrt(std::max(0.0, 81.0 * c3 * c3 - 200.0 * c1));
        const double A3 = (-9.0 * c3 - root) / 100.0;
        const double A4 = (-9.0 * c3 + root) / 100.0;
        const double q3 = 200.0 * c1 - 3.0 * c3 * (root + 9.0 * c3);
        const double q4 = 200.0 * c1 + 3.0 * c3 * (root - 9.0 * c3);
        const double F3 = (-9.0 * c3 - root) * q3 * q3 / 6250000.0;
        const double F4 = (-9.0 * c3 + root) * q4 * q4 / 6250000.0;

        SingularityKind k3 = SingularityKind::simple_bifurcation;
        SingularityKind k4 = SingularityKind::isola;
        if (at_c32) {
            k3 = k4 = SingularityKind::winged_cusp;
        } else if (at_c31) {
            k4 = SingularityKind::high_codim;
        } else if (c3 < t.c31) {
            k4 = SingularityKind::simple_bifurcation;
        }
        out.push_back(make_point(SingularLabel::S3, k3, A3, F3, p));
        out.push_back(make_point(SingularLabel::S4, k4, A4, F4, p));
    }
    return out;
}

double mixed_partial_fd(double A, double Omega, const Params& p) {
    const double h = 1e-5 * std::max(1.0, std::abs(Omega));
    const double d1 = (eval_dg_dA(A, Omega + h, p) - eval_dg_dA(A, Omega - h, p)) / (2.0 * h);
    const double d2 = (eval_dg_dA(A, Omega + 0.5 * h, p) - eval_dg_dA(A, Omega - 0.5 * h, p)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

SingularityKind classify(const HBPoint& pt, const Params& p, const ClassifyTolerances& tol) {
    validate(p);
    const double A = pt.A, W = pt.Omega, F = pt.F;
    auto value = [&](int na, int nw) { return g_partial(A, W, F, p, na, nw); };
    auto scale = [&](int na, int nw) { return std::max(g_partial_scale(A, W, F, p, na, nw), 1e-300); };
    auto is_zero = [&](int na, int nw) { return std::abs(value(na, nw)) <= tol.zero * scale(na, nw); };
    auto is_nonzero = [&](int na, int nw) { return std::abs(value(na, nw)) > tol.nonzero * scale(na, nw); };

    if (!is_zero(0, 0))
        throw InvalidArgument("classify: point is not on the balance curve (|g| too large)");
    if (!is_zero(1, 0))
        return SingularityKind::regular;

    if (is_zero(0, 1)) {
        if (is_zero(2, 0) && is_zero(1, 1)) {
            if (is_zero(3, 0)) {
                if (is_nonzero(4, 0))
                    return SingularityKind::high_codim;
            } else if (is_nonzero(3, 0) && is_nonzero(0, 2)) {
                return SingularityKind::winged_cusp;
            }
            throw Unclassifiable("classify: degenerate point beyond the winged cusp / codim-4 tests");
        }
        const double det = value(2, 0) * value(0, 2) - value(1, 1) * value(1, 1);
        // g_AOmega contains c1^2 - 2 + 2 Omega, which cancels structurally at
        // resonance; its term-wise scale would swamp small c1.
        const double det_scale = scale(2, 0) * scale(0, 2) + value(1, 1) * value(1, 1);
        if (is_nonzero(2, 0) && std::abs(det) > tol.nonzero * det_scale)
            return det > 0.0 ? SingularityKind::isola : SingularityKind::simple_bifurcation;
        throw Unclassifiable("classify: isola / simple bifurcation nondegeneracy fails");
    }
    if (is_zero(2, 0)) {
        if (is_nonzero(3, 0))
            return SingularityKind::hysteresis;
        throw Unclassifiable("classify: hysteresis nondegeneracy fails");
    }
    return SingularityKind::fold;
}

// ---------------------------------------------------------------------------
// Hysteresis

namespace {

/// d/dc3 of the (nA, nOmega) partial of g.
double g_partial_dc3(double A, double W, const Params& p, int na, int nw) {
    struct Term {
        double coef;
        int a, w;
    };
    const Term terms[] = {{60.0, 4, 4}, {18.0 * p.c3, 3, 3}, {6.0 * p.c1, 2, 2}};
    auto falling = [](int n, int k) {
        double out = 1.0;
        for (int i = 0; i < k; ++i)
            out *= static_cast<double>(n - i);
        return out;
    };
    double acc = 0.0;
    for (const auto& t : terms) {
        if (t.a < na || t.w < nw)
            continue;
        acc += t.coef * falling(t.a, na) * falling(t.w, nw) * std::pow(A, t.a - na) * std::pow(W, t.w - nw);
    }
    return acc;
}

/// Real roots of a polynomial with coefficients in ascending order.
std::vector<double> real_roots(const std::vector<double>& coeffs) {
    std::vector<double> c = coeffs;
    while (c.size() > 1 && c.back() == 0.0)
        c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> out;
    if (n < 1)
        return out;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        comp(0, j) = -c[static_cast<std::size_t>(n - 1 - j)] / c.back();
    for (int i = 1; i < n; ++i)
        comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < n; ++i) {
        const auto z = es.eigenvalues()[i];
        if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real())))
            out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

HysteresisPoint make_hysteresis_point(double c3, double A, double W, double c1) {
    const double F = eval_g(A, W, 0.0, Params{c1, c3});
    return {c3, std::sqrt(std::max(F, 0.0)), A, W};
}

}  // namespace

HysteresisPoint refine_hysteresis(const Params& p, double A0, double Omega0) {
    double A = A0, W = Omega0;
    for (int it = 0; it < 60; ++it) {
        const double r1 = g_partial(A, W, 0.0, p, 1, 0);
        const double r2 = g_partial(A, W, 0.0, p, 2, 0);
        Eigen::Matrix2d J;
        J << g_partial(A, W, 0.0, p, 2, 0), g_partial(A, W, 0.0, p, 1, 1), g_partial(A, W, 0.0, p, 3, 0),
            g_partial(A, W, 0.0, p, 2, 1);
        const Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(r1, r2));
        if (!step.allFinite())
            break;
        A -= step[0];
        W -= step[1];
        if (std::abs(step[0]) <= 1e-14 * (1.0 + std::abs(A)) && std::abs(step[1]) <= 1e-14 * (1.0 + std::abs(W))) {
            const double s1 = g_partial_scale(A, W, 0.0, p, 1, 0);
            const double s2 = g_partial_scale(A, W, 0.0, p, 2, 0);
            if (std::abs(g_partial(A, W, 0.0, p, 1, 0)) <= 1e-10 * s1 &&
                std::abs(g_partial(A, W, 0.0, p, 2, 0)) <= 1e-10 * s2 && A > 0.0 && W > 0.0)
                return make_hysteresis_point(p.c3, A, W, p.c1);
            break;
        }
    }
    throw NumericalError("refine_hysteresis: Newton did not converge");
}

std::vector<HysteresisPoint> hysteresis_points(const Params& p, const HysteresisOptions& opts) {
    validate(p);
    const std::size_t n = opts.omega_scan;
    std::vector<double> Ws(n + 1);
    std::vector<std::vector<double>> roots(n + 1);
    std::vector<std::vector<double>> gA(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double W = opts.omega_sq_min + (opts.omega_sq_max - opts.omega_sq_min) * static_cast<double>(i) /
                                                 static_cast<double>(n);
        Ws[i] = W;
        // g_AA / (2 W^2) as a cubic in A
        const double W2 = W * W, W3 = W2 * W;
        const std::vector<double> cubic = {6.0 * p.c1 * p.c3, (27.0 * p.c3 * p.c3 + 60.0 * p.c1) * W,
                                           360.0 * p.c3 * W2, 1000.0 * W3};
        for (double A : real_roots(cubic)) {
            if (A <= 0.0)
                continue;
            roots[i].push_back(A);
            gA[i].push_back(g_partial(A, W, 0.0, p, 1, 0));
        }
    }
    std::vector<HysteresisPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (roots[i].size() != roots[i + 1].size())
            continue;
        for (std::size_t k = 0; k < roots[i].size(); ++k) {
            if ((gA[i][k] > 0.0) == (gA[i + 1][k] > 0.0))
                continue;
            const double t = gA[i][k] / (gA[i][k] - gA[i + 1][k]);
            try {
                auto pt = refine_hysteresis(p, roots[i][k] + t * (roots[i + 1][k] - roots[i][k]),
                                            Ws[i] + t * (Ws[i + 1] - Ws[i]));
                if (eval_g(pt.A, pt.Omega, 0.0, p) < 0.0)
                    continue;
                const bool dup = std::any_of(out.begin(), out.end(), [&](const HysteresisPoint& q) {
                    return std::abs(q.A - pt.A) < 1e-9 && std::abs(q.Omega - pt.Omega) < 1e-9;
                });
                if (!dup)
                    out.push_back(pt);
            } catch (const NumericalError&) {
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.Omega < b.Omega; });
    return out;
}

namespace {

struct LocusState {
    Eigen::Vector3d y;  // (A, Omega, c3)
};

Eigen::Vector2d locus_residual(const Eigen::Vector3d& y, double c1) {
    const Params p{c1, y[2]};
    return {g_partial(y[0], y[1], 0.0, p, 1, 0), g_partial(y[0], y[1], 0.0, p, 2, 0)};
}

Eigen::Matrix<double, 2, 3> locus_jacobian(const Eigen::Vector3d& y, double c1) {
    const Params p{c1, y[2]};
    Eigen::Matrix<double, 2, 3> J;
    J << g_partial(y[0], y[1], 0.0, p, 2, 0), g_partial(y[0], y[1], 0.0, p, 1, 1), g_partial_dc3(y[0], y[1], p, 1, 0),
        g_partial(y[0], y[1], 0.0, p, 3, 0), g_partial(y[0], y[1], 0.0, p, 2, 1), g_partial_dc3(y[0], y[1], p, 2, 0);
    return J;
}

Eigen::Vector3d locus_tangent(const Eigen::Vector3d& y, double c1) {
    const auto J = locus_jacobian(y, c1);
    Eigen::Vector3d t = Eigen::Vector3d(J.row(0).transpose()).cross(Eigen::Vector3d(J.row(1).transpose()));
    return t.normalized();
}

/// Newton corrector on {R(y) = 0, t . (y - anchor) = 0}.
bool locus_correct(Eigen::Vector3d& y, const Eigen::Vector3d& anchor, const Eigen::Vector3d& t, double c1, int& iters) {
    for (iters = 0; iters < 12; ++iters) {
        const Eigen::Vector2d r = locus_residual(y, c1);
        Eigen::Matrix3d M;
        M.topRows<2>() = locus_jacobian(y, c1);
        M.row(2) = t.transpose();
        Eigen::Vector3d rhs;
        rhs << r, t.dot(y - anchor);
        const Eigen::Vector3d dy = M.fullPivLu().solve(rhs);
        if (!dy.allFinite())
            return false;
        y -= dy;
        if (dy.norm() <= 1e-13 * (1.0 + y.norm())) {
            const Params p{c1, y[2]};
            return std::abs(g_partial(y[0], y[1], 0.0, p, 1, 0)) <= 1e-9 * g_partial_scale(y[0], y[1], 0.0, p, 1, 0) &&
                   std::abs(g_partial(y[0], y[1], 0.0, p, 2, 0)) <= 1e-9 * g_partial_scale(y[0], y[1], 0.0, p, 2, 0);
        }
    }
    return false;
}

double segment_distance(const Eigen::Vector3d& q, const HysteresisPoint& a, const HysteresisPoint& b) {
    const Eigen::Vector3d pa(a.A, a.Omega, a.c3), pb(b.A, b.Omega, b.c3);
    const Eigen::Vector3d d = pb - pa;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (q - pa).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (q - (pa + t * d)).norm();
}

}  // namespace

HysteresisLocus hysteresis_locus(double c1, std::pair<double, double> c3_range, const HysteresisOptions& opts) {
    if (!(c1 > 0.0))
        throw InvalidArgument("hysteresis_locus: c1 must be positive");
    auto [c3_lo, c3_hi] = c3_range;
    if (!(c3_hi > c3_lo))
        throw InvalidArgument("hysteresis_locus: empty c3 range");

    HysteresisLocus locus;

    // Monitors whose sign change ends a segment: g_Omega and g_AAA.
    auto monitors = [&](const Eigen::Vector3d& y) {
        const Params p{c1, y[2]};
        return Eigen::Vector2d(g_partial(y[0], y[1], 0.0, p, 0, 1), g_partial(y[0], y[1], 0.0, p, 3, 0));
    };
    auto to_point = [&](const Eigen::Vector3d& y) { return make_hysteresis_point(y[2], y[0], y[1], c1); };
    auto covered = [&](const Eigen::Vector3d& q) {
        for (const auto& line : locus.polylines)
            for (std::size_t i = 1; i < line.size(); ++i)
                if (segment_distance(q, line[i - 1], line[i]) < 1e-3)
                    return true;
        return false;
    };

    auto march = [&](Eigen::Vector3d y, double direction) {
        std::vector<HysteresisPoint> pts;
        Eigen::Vector3d t = locus_tangent(y, c1);
        if (t[2] * direction < 0.0)
            t = -t;
        double h = opts.step;
        for (std::size_t n = 0; n < opts.max_points; ++n) {
            Eigen::Vector3d y_new = y + h * t;
            int iters = 0;
            if (!locus_correct(y_new, y + h * t, t, c1, iters)) {
                h *= 0.5;
                if (h < 1e-9) {
                    locus.notices.push_back("hysteresis corrector failed near c3 = " + std::to_string(y[2]));
                    break;
                }
                continue;
            }
            // Stop on the first lost nondegeneracy, locating it by bisection on the step.
            const Eigen::Vector2d m0 = monitors(y), m1 = monitors(y_new);
            int lost = -1;
            for (int k = 0; k < 2; ++k)
                if ((m0[k] > 0.0) != (m1[k] > 0.0))
                    lost = k;
            if (lost >= 0) {
                double lo = 0.0, hi = h;
                Eigen::Vector3d y_hit = y_new;
                for (int b = 0; b < 50; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    Eigen::Vector3d ym = y + mid * t;
                    int it2 = 0;
                    if (!locus_correct(ym, y + mid * t, t, c1, it2))
                        break;
                    y_hit = ym;
                    if ((monitors(ym)[lost] > 0.0) == (m0[lost] > 0.0))
                        lo = mid;
                    else
                        hi = mid;
                }
                pts.push_back(to_point(y_hit));
                locus.notices.push_back(std::string("hysteresis locus terminates at c3 = ") + std::to_string(y_hit[2]) +
                                        (lost == 0 ? ": dg/dOmega vanishes (higher-codimension point)"
                                                   : ": d3g/dA3 vanishes"));
                break;
            }
            if (y_new[2] < c3_lo || y_new[2] > c3_hi) {
                // Land on the window edge.
                const double edge = y_new[2] < c3_lo ? c3_lo : c3_hi;
                try {
                    const double s = (edge - y[2]) / (y_new[2] - y[2]);
                    const Eigen::Vector3d guess = y + s * (y_new - y);
                    pts.push_back(refine_hysteresis(Params{c1, edge}, guess[0], guess[1]));
                } catch (const NumericalError&) {
                }
                break;
            }
            if (y_new[1] < opts.omega_sq_min || y_new[1] > opts.omega_sq_max) {
                locus.notices.push_back("hysteresis locus leaves the Omega window at c3 = " + std::to_string(y_new[2]));
                break;
            }
            if (eval_g(y_new[0], y_new[1], 0.0, Params{c1, y_new[2]}) < 0.0) {
                locus.notices.push_back("hysteresis locus reaches F = 0 near c3 = " + std::to_string(y_new[2]));
                pts.push_back(to_point(y_new));
                break;
            }
            Eigen::Vector3d t_new = locus_tangent(y_new, c1);
            if (t_new.dot(t) < 0.0)
                t_new = -t_new;
            y = y_new;
            t = t_new;
            pts.push_back(to_point(y));
            if (iters <= 3)
                h = std::min(1.5 * h, opts.max_step);
            else if (iters > 6)
                h *= 0.5;
        }
        return pts;
    };

    const std::size_t columns = std::max<std::size_t>(opts.seed_columns, 2);
    for (std::size_t c = 0; c < columns; ++c) {
        const double c3 = c3_lo + (c3_hi - c3_lo) * static_cast<double>(c) / static_cast<double>(columns - 1);
        for (const auto& seed : hysteresis_points(Params{c1, c3}, opts)) {
            const Eigen::Vector3d y0(seed.A, seed.Omega, seed.c3);
            if (covered(y0))
                continue;
            auto backward = march(y0, -1.0);
            auto forward = march(y0, +1.0);
            std::vector<HysteresisPoint> line(backward.rbegin(), backward.rend());
            line.push_back(seed);
            line.insert(line.end(), forward.begin(), forward.end());
            if (line.size() >= 2)
                locus.polylines.push_back(std::move(line));
        }
    }
    return locus;
}

// ---------------------------------------------------------------------------
// Region chart

double superisola_boundary(double c1) {
    const auto t = thresholds(c1);
    auto diff = [&](double c3) {
        const auto pts = closed_form_singularities(Params{c1, c3});
        double F3 = 0.0, F4 = 0.0;
        for (const auto& s : pts) {
            if (s.label == SingularLabel::S3)
                F3 = s.F;
            if (s.label == SingularLabel::S4)
                F4 = s.F;
        }
        return F3 - F4;
    };
    double hi = t.c31 - 1e-9 * std::abs(t.c31);
    double lo = hi;
    const double f_hi = diff(hi);
    double f_lo = f_hi;
    for (int k = 0; k < 200 && (f_lo > 0.0) == (f_hi > 0.0); ++k) {
        lo -= 0.01 * std::abs(t.c31);
        f_lo = diff(lo);
    }
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw NumericalError("superisola_boundary: no crossing of the S3/S4 merge forcings");
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(diff, lo, hi, f_lo, f_hi, tol, iters);
    return 0.5 * (a + b);
}

RegionChart region_chart(double c1, std::pair<double, double> c3_window, std::pair<double, double> f_window,
                         std::size_t resolution, const RegionOptions& opts) {
    if (!(c1 > 0.0))
        throw InvalidArgument("region_chart: c1 must be positive");
    const auto [c3_lo, c3_hi] = c3_window;
    const auto [f_lo, f_hi] = f_window;
    if (!(c3_hi > c3_lo) || !(f_hi > f_lo) || f_lo < 0.0 || resolution < 2)
        throw InvalidArgument("region_chart: windows must be nonempty and resolution >= 2");

    RegionChart chart;
    chart.c1 = c1;
    const auto t = thresholds(c1);

    ChartCurve s3{"S3_simple_bifurcation", SingularityKind::simple_bifurcation, {}};
    ChartCurve s4_isola{"S4_isola", SingularityKind::isola, {}};
    ChartCurve s4_simple{"S4_simple_bifurcation", SingularityKind::simple_bifurcation, {}};
    ChartCurve s12{"S1_S2_isola", SingularityKind::isola, {}};

    // Sweep the closed forms; include the thresholds exactly so curves end on them.
    std::vector<double> c3s;
    for (std::size_t i = 0; i < resolution; ++i)
        c3s.push_back(c3_lo + (c3_hi - c3_lo) * static_cast<double>(i) / static_cast<double>(resolution - 1));
    for (double c : {t.c31, t.c32})
        if (c > c3_lo && c < c3_hi)
            c3s.push_back(c);
    std::sort(c3s.begin(), c3s.end());

    for (double c3 : c3s) {
        for (const auto& s : closed_form_singularities(Params{c1, c3})) {
            const HysteresisPoint q{c3, s.f(), s.A, s.Omega};
            switch (s.label) {
            case SingularLabel::S3: s3.points.push_back(q); break;
            case SingularLabel::S4:
                if (c3 >= t.c31)
                    s4_isola.points.push_back(q);
                if (c3 <= t.c31)
                    s4_simple.points.push_back(q);
                break;
            case SingularLabel::S1: s12.points.push_back(q); break;
            default: break;
            }
        }
    }
    for (auto* curve : {&s4_isola, &s12})
        if (!curve->points.empty())
            chart.isola_curves.push_back(*curve);
    for (auto* curve : {&s3, &s4_simple})
        if (!curve->points.empty())
            chart.simple_bif_curves.push_back(*curve);

    auto locus = hysteresis_locus(c1, c3_window, opts.hysteresis);
    for (std::size_t i = 0; i < locus.polylines.size(); ++i)
        chart.hysteresis_curves.push_back(
            {"hysteresis_" + std::to_string(i), SingularityKind::hysteresis, std::move(locus.polylines[i])});
    chart.notices = std::move(locus.notices);

    if (t.c32 >= c3_lo && t.c32 <= c3_hi) {
        const auto pts = closed_form_singularities(Params{c1, t.c32});
        chart.special_points.push_back({"winged_cusp", SingularityKind::winged_cusp, t.c32, pts.front().f(), pts.front().A});
    }
    if (t.c31 >= c3_lo && t.c31 <= c3_hi) {
        const double A = std::sqrt(10.0 * c1) / 10.0;
        chart.special_points.push_back({"high_codim", SingularityKind::high_codim, t.c31, 0.0, A});
    }
    try {
        const double cs = superisola_boundary(c1);
        if (cs >= c3_lo && cs <= c3_hi) {
            double f = 0.0, A = 0.0;
            for (const auto& s : closed_form_singularities(Params{c1, cs}))
                if (s.label == SingularLabel::S3) {
                    f = s.f();
                    A = s.A;
                }
            chart.special_points.push_back({"superisola_boundary", SingularityKind::simple_bifurcation, cs, f, A});
        }
    } catch (const NumericalError& e) {
        chart.notices.emplace_back(e.what());
    }

    // Zone labels: one representative between each pair of consecutive
    // critical forcings in a few c3 columns.
    const std::size_t columns = std::max<std::size_t>(opts.zone_columns, 1);
    for (std::size_t k = 0; k < columns; ++k) {
        const double c3 = c3_lo + (c3_hi - c3_lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(columns);
        std::vector<double> critical = {f_lo, f_hi};
        for (const auto& s : closed_form_singularities(Params{c1, c3}))
            critical.push_back(s.f());
        for (const auto& h : hysteresis_points(Params{c1, c3}, opts.hysteresis))
            critical.push_back(h.f);
        std::sort(critical.begin(), critical.end());
        critical.erase(std::remove_if(critical.begin(), critical.end(),
                                      [&](double f) { return f < f_lo || f > f_hi; }),
                       critical.end());
        critical.erase(std::unique(critical.begin(), critical.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                       critical.end());
        for (std::size_t i = 0; i + 1 < critical.size(); ++i) {
            const double f = 0.5 * (critical[i] + critical[i + 1]);
            if (f <= 0.0)
                continue;
            const auto branches = trace_frequency_response(Params{c1, c3}, f, opts.trace);
            ChartZone z;
            z.c3 = c3;
            z.f = f;
            z.isolated = count_isolated(branches);
            for (const auto& b : branches)
                if (b.kind == BranchKind::main)
                    z.main_folds += omega_reversals(b);
            if (z.isolated >= 2)
                z.label = "d";
            else if (z.isolated == 1)
                z.label = "b";
            else if (z.main_folds > 0)
                z.label = "c";
            else
                z.label = "a";
            chart.zones.push_back(z);
        }
    }
    return chart;
}

}  // namespace irc
