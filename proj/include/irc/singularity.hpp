// Nonpersistent singularities of the harmonic-balance curve g(A, Omega, F) = 0:
// closed-form points S1..S4 at Omega = 1, numerical classification from the
// defining and nondegeneracy conditions, the hysteresis locus, and the
// (c3, f) region chart at fixed c1.
#pragma once

#include "irc/hbcore.hpp"
#include "irc/model.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace irc {

enum class SingularityKind { regular, fold, isola, simple_bifurcation, hysteresis, winged_cusp, high_codim };
enum class SingularLabel { S1, S2, S3, S4, numeric };

const char* to_string(SingularityKind kind);
const char* to_string(SingularLabel label);

struct SingularPoint {
    SingularityKind kind = SingularityKind::regular;
    double A = 0.0;
    double Omega = 1.0;
    double F = 0.0;
    double hessian_det = 0.0;
    SingularLabel label = SingularLabel::numeric;

    double x_peak() const { return 2.0 * std::sqrt(A); }
    double f() const { return std::sqrt(F); }
};

/// Thrown by classify() when the defining conditions hold but every
/// nondegeneracy test is inconclusive.
class Unclassifiable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Thresholds {
    double c31 = 0.0;  ///< -(2/3) sqrt(10 c1): S1, S2 exist for c3 <= c31
    double c32 = 0.0;  ///< -(10/9) sqrt(2 c1): S3, S4 exist for c3 <= c32
};

Thresholds thresholds(double c1);

/// 1: no singularities (c3 > c32); 2: one isola and one simple bifurcation;
/// 3: two isolas at F = 0 and two simple bifurcations (c3 <= c31).
int zone(const Params& p);

/// Physically meaningful S1..S4 for the given coefficients.
std::vector<SingularPoint> closed_form_singularities(const Params& p);

struct ClassifyTolerances {
    double zero = 1e-8;     ///< defining condition holds if |value| <= zero * scale
    double nonzero = 1e-4;  ///< nondegeneracy holds if |value| > nonzero * scale
};

SingularityKind classify(const HBPoint& point, const Params& p, const ClassifyTolerances& tol = {});

/// Mixed partial d2g / dA dOmega by central differences of eval_dg_dA.
double mixed_partial_fd(double A, double Omega, const Params& p);

struct HysteresisPoint {
    double c3 = 0.0;
    double f = 0.0;
    double A = 0.0;
    double Omega = 1.0;
};

struct HysteresisLocus {
    std::vector<std::vector<HysteresisPoint>> polylines;
    std::vector<std::string> notices;  ///< terminations (nondegeneracy lost, window left, ...)
};

struct HysteresisOptions {
    double omega_sq_min = 0.2;
    double omega_sq_max = 2.5;
    std::size_t seed_columns = 9;   ///< c3 columns scanned for seeds
    std::size_t omega_scan = 4000;  ///< Omega grid of the seed scan
    double step = 2e-3;             ///< initial arclength step
    double max_step = 1e-2;
    std::size_t max_points = 20000;
};

/// Points (A, Omega) with g_A = g_AA = 0 at fixed (c1, c3), all Omega in the
/// scan window. F follows from g = 0; points with F < 0 are dropped.
std::vector<HysteresisPoint> hysteresis_points(const Params& p, const HysteresisOptions& opts = {});

/// Newton solve of g_A = g_AA = 0 in (A, Omega) at fixed coefficients.
/// Throws NumericalError when it does not converge.
HysteresisPoint refine_hysteresis(const Params& p, double A0, double Omega0);

/// Continues {g = g_A = g_AA = 0} in c3 over `c3_range` by pseudo-arclength.
HysteresisLocus hysteresis_locus(double c1, std::pair<double, double> c3_range, const HysteresisOptions& opts = {});

struct ChartCurve {
    std::string name;  ///< e.g. "S3", "S4_isola", "hysteresis_0"
    SingularityKind kind = SingularityKind::isola;
    std::vector<HysteresisPoint> points;  ///< (c3, f, A, Omega)
};

struct ChartPoint {
    std::string name;
    SingularityKind kind = SingularityKind::winged_cusp;
    double c3 = 0.0;
    double f = 0.0;
    double A = 0.0;
};

struct ChartZone {
    std::string label;  ///< a: monovalued, b: IRC, c: merged/multivalued, d: two IRCs
    double c3 = 0.0;
    double f = 0.0;
    std::size_t isolated = 0;
    std::size_t main_folds = 0;
};

struct RegionChart {
    double c1 = 0.1;
    std::vector<ChartCurve> isola_curves;
    std::vector<ChartCurve> simple_bif_curves;
    std::vector<ChartCurve> hysteresis_curves;
    std::vector<ChartPoint> special_points;
    std::vector<ChartZone> zones;
    std::vector<std::string> notices;
};

struct RegionOptions {
    std::size_t zone_columns = 6;  ///< c3 columns sampled for zone labels
    TraceOptions trace{};
    HysteresisOptions hysteresis{};
};

RegionChart region_chart(double c1, std::pair<double, double> c3_window, std::pair<double, double> f_window,
                         std::size_t resolution, const RegionOptions& opts = {});

/// c3 in zone 3 where the S3 and S4 merge forcings coincide; two IRCs merge
/// with each other first (superisola) for c3 above it.
double superisola_boundary(double c1);

}  // namespace irc
