#include "irc/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace irc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size())
            throw InvalidArgument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw InvalidArgument("damping law: '" + key + "' is not a number: " + text);
    }
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

Nondimensional nondimensionalize(const PhysicalParams& p) {
    if (!(p.m > 0.0) || !(p.k > 0.0) || !(p.ct1 > 0.0) || !(p.ct5 > 0.0))
        throw InvalidArgument("nondimensionalize: m, k, ct1 and ct5 must be strictly positive");
    if (!(p.wt > 0.0))
        throw InvalidArgument("nondimensionalize: forcing frequency must be positive");
    if (p.ft < 0.0)
        throw InvalidArgument("nondimensionalize: forcing amplitude must be nonnegative");

    Nondimensional out;
    out.params.c1 = p.ct1 / std::sqrt(p.k * p.m);
    out.params.c3 = p.ct3 * std::pow(p.k, -0.25) * std::pow(p.m, -0.25) / std::sqrt(p.ct5);

    // x = ct5^(1/4) k^(3/8) m^(-5/8) y  and  f = ct5^(1/4) m^(-5/8) k^(-5/8) ft
    const double x_per_y = std::pow(p.ct5, 0.25) * std::pow(p.k, 0.375) * std::pow(p.m, -0.625);
    const double f_per_ft = std::pow(p.ct5, 0.25) * std::pow(p.m, -0.625) * std::pow(p.k, -0.625);
    out.scales.time = std::sqrt(p.m / p.k);
    out.scales.frequency = std::sqrt(p.k / p.m);
    out.scales.displacement = 1.0 / x_per_y;
    out.scales.forcing = 1.0 / f_per_ft;
    out.f = p.ft * f_per_ft;
    out.omega = p.wt / out.scales.frequency;
    return out;
}

void validate(const Params& p) {
    if (!(p.c1 > 0.0) || !std::isfinite(p.c1))
        throw InvalidArgument("linear damping c1 must be strictly positive");
    if (!std::isfinite(p.c3))
        throw InvalidArgument("cubic damping c3 must be finite");
}

const char* to_string(LawKind kind) {
    switch (kind) {
    case LawKind::quintic: return "quintic";
    case LawKind::sine_cubic: return "sine_cubic";
    case LawKind::table: return "table";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// TabulatedOdd

TabulatedOdd::TabulatedOdd(std::vector<std::pair<double, double>> samples)
    : samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end());
    for (const auto& [v, fv] : samples_) {
        if (v < 0.0 || !std::isfinite(v) || !std::isfinite(fv))
            throw InvalidArgument("tabulated damping: samples must have finite v >= 0");
    }
    if (samples_.empty() || samples_.front().first > 0.0)
        samples_.insert(samples_.begin(), {0.0, 0.0});
    if (samples_.front().second != 0.0)
        throw InvalidArgument("tabulated damping: force at v = 0 must vanish for an odd law");
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i].first <= samples_[i - 1].first)
            throw InvalidArgument("tabulated damping: duplicate velocity samples");
    if (samples_.size() < 2)
        throw InvalidArgument("tabulated damping: need at least one sample with v > 0");

    const std::size_t n = samples_.size();
    knots_.reserve(2 * n - 1);
    values_.reserve(2 * n - 1);
    for (std::size_t i = n - 1; i >= 1; --i) {
        knots_.push_back(-samples_[i].first);
        values_.push_back(-samples_[i].second);
    }
    for (const auto& [v, fv] : samples_) {
        knots_.push_back(v);
        values_.push_back(fv);
    }

    // Natural spline: tridiagonal system for interior second derivatives.
    const std::size_t m = knots_.size();
    second_.assign(m, 0.0);
    if (m < 3)
        return;
    std::vector<double> diag(m, 0.0), rhs(m, 0.0), upper(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h0 = knots_[i] - knots_[i - 1];
        const double h1 = knots_[i + 1] - knots_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
    }
    // Thomas algorithm on rows 1..m-2; lower coefficient of row i is h_{i-1}.
    for (std::size_t i = 2; i + 1 < m; ++i) {
        const double lower = knots_[i] - knots_[i - 1];
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = m - 2; i >= 1; --i) {
        double value = rhs[i];
        if (i + 2 < m)
            value -= upper[i] * second_[i + 1];
        second_[i] = value / diag[i];
    }
}

double TabulatedOdd::force(double v) const {
    const double vmax = knots_.back();
    if (v > vmax)
        return values_.back() + dforce(vmax) * (v - vmax);
    if (v < 0.0)
        return -force(-v);  // exact oddness
    auto it = std::upper_bound(knots_.begin(), knots_.end(), v);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin(), 1), knots_.size() - 1);
    const double h = knots_[i] - knots_[i - 1];
    const double a = (knots_[i] - v) / h;
    const double b = (v - knots_[i - 1]) / h;
    return a * values_[i - 1] + b * values_[i] +
           ((a * a * a - a) * second_[i - 1] + (b * b * b - b) * second_[i]) * h * h / 6.0;
}

double TabulatedOdd::dforce(double v) const {
    const double vmax = knots_.back();
    v = std::min(std::abs(v), vmax);  // even; linear continuation beyond the table
    auto it = std::upper_bound(knots_.begin(), knots_.end(), v);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin(), 1), knots_.size() - 1);
    const double h = knots_[i] - knots_[i - 1];
    const double a = (knots_[i] - v) / h;
    const double b = (v - knots_[i - 1]) / h;
    return (values_[i] - values_[i - 1]) / h +
           ((1.0 - 3.0 * a * a) * second_[i - 1] + (3.0 * b * b - 1.0) * second_[i]) * h / 6.0;
}

// ---------------------------------------------------------------------------
// DampingLaw

DampingLaw DampingLaw::quintic(const Params& p) {
    validate(p);
    return DampingLaw(QuinticPoly{p});
}

DampingLaw DampingLaw::sine_cubic(double c1, double c3) {
    validate(Params{c1, c3});
    return DampingLaw(SineCubic{c1, c3});
}

DampingLaw DampingLaw::tabulated(std::vector<std::pair<double, double>> samples_v_nonneg) {
    return DampingLaw(TabulatedOdd(std::move(samples_v_nonneg)));
}

DampingLaw DampingLaw::from_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open damping table: " + path.string());
    std::vector<std::pair<double, double>> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double v = 0.0, fv = 0.0;
        if (!(ss >> v >> fv)) {
            if (samples.empty() && line_no == 1)
                continue;  // header row
            throw InvalidArgument("damping table " + path.string() + ": bad row " + std::to_string(line_no));
        }
        samples.emplace_back(v, fv);
    }
    DampingLaw law = tabulated(std::move(samples));
    law.table_path_ = path.string();
    return law;
}

DampingLaw DampingLaw::from_config(const std::map<std::string, std::string>& block) {
    for (const auto& [key, value] : block) {
        if (key != "law" && key != "c1" && key != "c3" && key != "table_path")
            throw InvalidArgument("damping law: unknown key '" + key + "'");
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = block.find(key);
        if (it == block.end())
            return std::nullopt;
        return it->second;
    };
    const std::string law = get("law").value_or("quintic");
    if (law == "table") {
        auto path = get("table_path");
        if (!path)
            throw InvalidArgument("damping law 'table' requires table_path");
        return from_table_csv(*path);
    }
    auto c1 = get("c1");
    if (!c1)
        throw InvalidArgument("damping law '" + law + "' requires c1");
    const double c1v = parse_number("c1", *c1);
    const double c3v = get("c3") ? parse_number("c3", *get("c3")) : 0.0;
    if (law == "quintic")
        return quintic(Params{c1v, c3v});
    if (law == "sine_cubic")
        return sine_cubic(c1v, c3v);
    throw InvalidArgument("unknown damping law '" + law + "' (expected quintic, sine_cubic or table)");
}

std::map<std::string, std::string> DampingLaw::to_config() const {
    std::map<std::string, std::string> out;
    out["law"] = to_string(kind());
    auto num = [](double x) {
        std::ostringstream ss;
        ss.precision(17);
        ss << x;
        return ss.str();
    };
    if (kind() == LawKind::table) {
        out["table_path"] = table_path_;
    } else {
        out["c1"] = num(c1());
        out["c3"] = num(c3());
    }
    return out;
}

double DampingLaw::force(double v) const {
    return std::visit(overloaded{
                          [v](const QuinticPoly& q) {
                              const double v2 = v * v;
                              return v * (q.params.c1 + v2 * (q.params.c3 + v2));
                          },
                          [v](const SineCubic& s) { return s.c1 * std::sin(v) + s.c3 * v * v * v; },
                          [v](const TabulatedOdd& t) { return t.force(v); },
                      },
                      impl_);
}

double DampingLaw::dforce(double v) const {
    return std::visit(overloaded{
                          [v](const QuinticPoly& q) {
                              const double v2 = v * v;
                              return q.params.c1 + v2 * (3.0 * q.params.c3 + 5.0 * v2);
                          },
                          [v](const SineCubic& s) { return s.c1 * std::cos(v) + 3.0 * s.c3 * v * v; },
                          [v](const TabulatedOdd& t) { return t.dforce(v); },
                      },
                      impl_);
}

LawKind DampingLaw::kind() const {
    return std::visit(overloaded{
                          [](const QuinticPoly&) { return LawKind::quintic; },
                          [](const SineCubic&) { return LawKind::sine_cubic; },
                          [](const TabulatedOdd&) { return LawKind::table; },
                      },
                      impl_);
}

double DampingLaw::c1() const {
    if (auto q = std::get_if<QuinticPoly>(&impl_))
        return q->params.c1;
    if (auto s = std::get_if<SineCubic>(&impl_))
        return s->c1;
    return 0.0;
}

double DampingLaw::c3() const {
    if (auto q = std::get_if<QuinticPoly>(&impl_))
        return q->params.c3;
    if (auto s = std::get_if<SineCubic>(&impl_))
        return s->c3;
    return 0.0;
}

double damping_force(const DampingLaw& law, double v) { return law.force(v); }

std::optional<std::pair<double, double>> damping_negative_interval(const Params& p) {
    validate(p);
    const double disc = p.c3 * p.c3 - 4.0 * p.c1;
    if (!(p.c3 < 0.0) || !(disc > 0.0))
        return std::nullopt;
    const double root = std::sqrt(disc);
    return std::make_pair(std::sqrt((-p.c3 - root) / 2.0), std::sqrt((-p.c3 + root) / 2.0));
}

}  // namespace irc
