// Forced single-DoF oscillator with odd nonlinear damping:
//
//     x'' + x + F_d(x') = 2 f cos(omega t)
//
// The damping law F_d is one of a quintic polynomial (normalized quintic
// coefficient), a sine + cubic law, or a user-supplied odd table.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace irc {

/// Raised when a function receives arguments outside its contract.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to converge or loses accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimensional coefficients of m y'' + k y + ct1 y' + ct3 y'^3 + ct5 y'^5 = 2 ft cos(wt t).
struct PhysicalParams {
    double m = 1.0;
    double k = 1.0;
    double ct1 = 0.1;
    double ct3 = 0.0;
    double ct5 = 1.0;
    double ft = 0.0;
    double wt = 1.0;
};

/// Dimensionless damping coefficients; the quintic coefficient is fixed to 1.
struct Params {
    double c1 = 0.1;
    double c3 = 0.0;
};

/// Multiply a dimensionless quantity by its scale to get the physical value.
struct Scales {
    double time = 1.0;
    double displacement = 1.0;
    double forcing = 1.0;
    double frequency = 1.0;
};

struct Nondimensional {
    Params params;
    Scales scales;
    double f = 0.0;      ///< dimensionless forcing half-amplitude
    double omega = 1.0;  ///< dimensionless forcing frequency
};

Nondimensional nondimensionalize(const PhysicalParams& p);

void validate(const Params& p);

enum class LawKind { quintic, sine_cubic, table };

const char* to_string(LawKind kind);

/// c1 v + c3 v^3 + v^5
struct QuinticPoly {
    Params params;
};

/// c1 sin(v) + c3 v^3
struct SineCubic {
    double c1 = 0.1;
    double c3 = 0.0;
};

/// Odd law given by samples at v >= 0, interpolated by a natural cubic spline
/// through the mirrored data. Beyond the last sample the spline is continued
/// linearly with its end slope.
class TabulatedOdd {
public:
    TabulatedOdd() = default;
    explicit TabulatedOdd(std::vector<std::pair<double, double>> samples);

    double force(double v) const;
    double dforce(double v) const;
    double v_max() const { return knots_.empty() ? 0.0 : knots_.back(); }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

private:
    std::vector<std::pair<double, double>> samples_;
    std::vector<double> knots_;   // full mirrored abscissae
    std::vector<double> values_;
    std::vector<double> second_;  // spline second derivatives at knots
};

class DampingLaw {
public:
    DampingLaw() : impl_(QuinticPoly{}) {}
    static DampingLaw quintic(const Params& p);
    static DampingLaw sine_cubic(double c1, double c3);
    static DampingLaw tabulated(std::vector<std::pair<double, double>> samples_v_nonneg);
    static DampingLaw from_table_csv(const std::filesystem::path& path);

    /// Builds a law from a key-value block: law, c1, c3, table_path.
    static DampingLaw from_config(const std::map<std::string, std::string>& block);
    std::map<std::string, std::string> to_config() const;

    double force(double v) const;
    double dforce(double v) const;

    LawKind kind() const;
    /// Linear and cubic coefficients; meaningless for tables (returns zeros).
    double c1() const;
    double c3() const;
    const TabulatedOdd* table() const { return std::get_if<TabulatedOdd>(&impl_); }

private:
    using Impl = std::variant<QuinticPoly, SineCubic, TabulatedOdd>;
    explicit DampingLaw(Impl impl) : impl_(std::move(impl)) {}
    Impl impl_;
    std::string table_path_;
};

/// Damping force of `law` at velocity v.
double damping_force(const DampingLaw& law, double v);

/// Velocity band sqrt((-c3 - sqrt(c3^2-4c1))/2) < |v| < sqrt((-c3 + sqrt(c3^2-4c1))/2)
/// in which the quintic damping force is negative. Empty unless c3 < -2 sqrt(c1);
/// a tangency (zero discriminant) is also reported as empty.
std::optional<std::pair<double, double>> damping_negative_interval(const Params& p);

}  // namespace irc
