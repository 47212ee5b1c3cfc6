// Single-harmonic balance of the forced oscillator.
//
// With x = gamma e^{j w t} + c.c., A = |gamma|^2, Omega = w^2 and F = f^2 the
// steady state of the quintic-damping oscillator satisfies g(A, Omega, F) = 0:
//
//   g = 100 A^5 W^5 + 60 A^4 c3 W^4 + A^3 W^3 (20 c1 + 9 c3^2) + 6 A^2 c1 c3 W^2
//       + A ((c1^2 - 2) W + W^2 + 1) - F
//
// For an arbitrary odd law the same balance reads, with displacement amplitude
// X = 2 sqrt(A) and velocity amplitude V = w X,
//
//   (1 - w^2)^2 X^2 + fd(V)^2 = (2 f)^2 ,
//
// where fd is the averaged damping. For the quintic law this is exactly 4 g.
#pragma once

#include "irc/model.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace irc {

struct HBPoint {
    double A = 0.0;
    double Omega = 1.0;
    double F = 0.0;

    double x_peak() const;  ///< 2 sqrt(A)
    double omega() const;   ///< sqrt(Omega)
    double f() const;       ///< sqrt(F)
};

// Closed-form residual and derivatives, as printed in the harmonic-balance
// derivation.
double eval_g(double A, double Omega, double F, const Params& p);
double eval_dg_dA(double A, double Omega, const Params& p);
double eval_dg_dOmega(double A, double Omega, const Params& p);
double eval_d2g_dA2(double A, double Omega, const Params& p);
double eval_hessian_det(double A, double Omega, const Params& p);

/// Exact partial derivative d^(nA+nOmega) g / dA^nA dOmega^nOmega evaluated from
/// the monomial table of g. The F term only contributes to the (0, 0) entry.
double g_partial(double A, double Omega, double F, const Params& p, int nA, int nOmega);

/// Largest |monomial| of the same partial derivative; used as the local
/// magnitude scale when deciding whether a value is numerically zero.
double g_partial_scale(double A, double Omega, double F, const Params& p, int nA, int nOmega);

/// Hessian determinant of g in (A, Omega) from central finite differences of
/// eval_g. Independent of the closed forms.
double hessian_det_fd(double A, double Omega, const Params& p);

struct CheckedHessian {
    double value = 0.0;  ///< authoritative value
    double closed_form = 0.0;
    double finite_difference = 0.0;
    bool consistent = true;  ///< false when the two routes disagree beyond 1e-6 relative
};

/// Closed-form determinant guarded by the finite-difference route: if the two
/// disagree, the finite-difference value is returned and `consistent` is false.
CheckedHessian hessian_det_checked(double A, double Omega, const Params& p);

struct RootOptions {
    double tol_res = 1e-10;   ///< scaled by max(1, F)
    double tol_root = 1e-9;   ///< duplicates closer than tol_root (1 + A) are merged
    int max_newton = 60;
};

struct AmplitudeRoots {
    std::vector<double> A;  ///< ascending, all >= 0
    bool ill_conditioned = false;
    std::string diagnostic;
};

/// All real nonnegative roots A of g(., Omega, F) = 0 (degree-5 polynomial).
AmplitudeRoots solve_amplitudes(double Omega, double F, const Params& p, const RootOptions& opts = {});

/// (1 - w^2)^2 X^2 + fd(w X)^2 - 4 f^2 for any odd damping law.
double hb_residual(const DampingLaw& law, double x_peak, double omega, double f);

/// Amplitudes X in (0, x_max] solving the balance at (w, f) for any law,
/// ascending; sign changes on a uniform grid refined by a bracketing solver.
std::vector<double> hb_amplitudes(const DampingLaw& law, double omega, double f, double x_max,
                                  std::size_t grid = 4000);

/// Initial state (x(0), x'(0)) of the harmonic x = X cos(w t + phi) that solves the
/// balance at (X, w, f). For f = 0 the phase is chosen with x'(0) = 0.
std::pair<double, double> harmonic_initial_state(const DampingLaw& law, double x_peak, double omega, double f);

enum class BranchKind { main, isolated };
enum class Stability { unknown, stable, unstable };

const char* to_string(BranchKind kind);
const char* to_string(Stability s);

struct BranchSample {
    double omega = 0.0;
    double x_peak = 0.0;
    double A = 0.0;
    Stability stability = Stability::unknown;
};

struct ResponseBranch {
    std::vector<BranchSample> samples;
    BranchKind kind = BranchKind::main;
    bool closed = false;
    int component = 0;  ///< connected component of the balance curve (0 = main)
    double v_lo = 0.0;  ///< velocity-amplitude extent of the component
    double v_hi = 0.0;
};

struct TraceOptions {
    double omega_min = 0.2;
    double omega_max = 2.0;
    std::size_t samples = 2000;      ///< target number of samples over all branches
    std::optional<double> v_max;     ///< velocity-amplitude search limit; auto when unset
    std::size_t scan_points = 20000; ///< grid used to bracket component boundaries
};

/// Velocity amplitude above which |fd| exceeds `target` for good, when such a
/// bound exists for the law.
std::optional<double> amplitude_bound(const DampingLaw& law, double target);

/// Frequency response at forcing f over the window [omega_min, omega_max].
///
/// The balance is solved explicitly for w along the velocity amplitude V:
/// every connected component is one interval of {V : |fd(V)| <= 2 f}, traced
/// once on the w < 1 side and once on the w > 1 side. The component that
/// contains V = 0 is the main branch; every other component is isolated and
/// closed (unless cut by the window or by v_max).
std::vector<ResponseBranch> trace_frequency_response(const DampingLaw& law, double f, const TraceOptions& opts = {});
std::vector<ResponseBranch> trace_frequency_response(const Params& p, double f, const TraceOptions& opts = {});

/// Number of closed isolated branches.
std::size_t count_isolated(const std::vector<ResponseBranch>& branches);

/// Number of direction reversals of w along a branch (folds).
std::size_t omega_reversals(const ResponseBranch& branch);

}  // namespace irc
