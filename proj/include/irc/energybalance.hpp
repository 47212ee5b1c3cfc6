// Averaged (first-harmonic) damping and IRC onset/merge prediction.
//
// For a mono-harmonic motion of amplitude x0 at unit frequency the forcing
// needed to balance the energy dissipated per cycle is
//
//     fd(x0) = (1/pi) * integral_0^{2pi} cos(t) F_d(x0 cos t) dt ,
//
// with fd = 2f. Zeros and extrema of |fd| mark where isolated resonance curves
// are born and where they merge.
#pragma once

#include "irc/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace irc {

/// Averaged damping fd = 2f at amplitude x0 >= 0. Closed forms are used for
/// the quintic and sine + cubic laws, quadrature otherwise.
double averaged_damping(const DampingLaw& law, double x0);

/// Always evaluates fd by adaptive periodic trapezoidal quadrature.
/// Throws NumericalError if the quadrature fails to reach `rel_tol`.
double averaged_damping_quadrature(const DampingLaw& law, double x0, double rel_tol = 1e-13);

/// d fd / d x0 (closed forms where available, otherwise quadrature of F_d').
double averaged_damping_slope(const DampingLaw& law, double x0);

struct AveragedDampingCurve {
    DampingLaw law;
    std::vector<double> x0;
    std::vector<double> fd;
    std::optional<LawKind> closed_form;  ///< set when fd comes from a closed form
};

AveragedDampingCurve sample_averaged_damping(const DampingLaw& law, double x0_max, std::size_t n);

enum class EventKind { onset_zero, onset_min, merge_max, merge_min_between_zeros };
enum class StabilityHint { fully_unstable, upper_branch_stable, none };

const char* to_string(EventKind kind);
const char* to_string(StabilityHint hint);

/// A predicted birth or merge of an IRC. `f` is the single-amplitude forcing
/// (fd / 2), always nonnegative.
struct IRCEvent {
    EventKind kind = EventKind::onset_zero;
    double x0 = 0.0;
    double f = 0.0;
    StabilityHint stability_hint = StabilityHint::none;
};

/// Scans fd on (0, x0_max] with `resolution` grid cells and refines every
/// zero (bracketing root solver) and every extremum (Brent minimization).
/// Events are sorted by x0.
std::vector<IRCEvent> predict_irc_events(const DampingLaw& law, double x0_max, std::size_t resolution = 0);

/// The same zero/extremum analysis for any curve y(x) with slope y'(x).
std::vector<IRCEvent> curve_events(const std::function<double(double)>& y, const std::function<double(double)>& slope,
                                   double x_max, std::size_t resolution = 0);

/// Zeros and extrema of the instantaneous damping force Fd(v) (f = |Fd| / 2).
std::vector<IRCEvent> damping_force_events(const DampingLaw& law, double v_max, std::size_t resolution = 0);

/// One merge of the connectivity walk. Valleys (IRC births) are numbered by
/// amplitude, 1..n; valley 0 is the main branch. `left`/`right` are the
/// valleys adjacent to the merge point and the component vectors list all
/// valleys already connected to each side just before the merge.
struct MergeStep {
    IRCEvent event;
    int left = 0;
    int right = -1;  ///< -1 when no birth was found above the merge amplitude
    std::vector<int> left_component;
    std::vector<int> right_component;
};

std::vector<MergeStep> merge_ordering(const std::vector<IRCEvent>& events);

/// "a-b" label for a merge (valley indices).
std::string merge_label(const MergeStep& step);

}  // namespace irc
