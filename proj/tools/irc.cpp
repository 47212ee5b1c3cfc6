// irc: command-line front end. Every command writes plot-ready CSV or JSON
// files into --out and prints a short summary on stdout.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.
#include "irc/energybalance.hpp"
#include "irc/export.hpp"
#include "irc/hbcore.hpp"
#include "irc/model.hpp"
#include "irc/singularity.hpp"
#include "irc/timedomain.hpp"
#include "irc/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace irc;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LawArgs {
    std::string law = "quintic";
    double c1 = 0.1;
    double c3 = -0.6;
    std::string table_path;

    DampingLaw build() const {
        std::map<std::string, std::string> block{{"law", law}};
        if (law == "table") {
            block["table_path"] = table_path;
        } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", c1);
            block["c1"] = buf;
            std::snprintf(buf, sizeof buf, "%.17g", c3);
            block["c3"] = buf;
        }
        return DampingLaw::from_config(block);
    }
};

void add_law_options(CLI::App* sub, LawArgs& a) {
    sub->add_option("--law", a.law, "Damping law")->check(CLI::IsMember({"quintic", "sine_cubic", "table"}));
    sub->add_option("--c1", a.c1, "Linear damping coefficient");
    sub->add_option("--c3", a.c3, "Cubic damping coefficient");
    sub->add_option("--table-path", a.table_path, "Two-column CSV (v, force) for --law table");
}

/// Tolerances reachable through --tol-override key=val.
struct Tolerances {
    TimeDomainOptions td;
    ContinuationOptions cont;
    BasinOptions basin;

    void apply(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--tol-override expects key=val, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        double val = 0.0;
        try {
            std::size_t used = 0;
            val = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1)
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("--tol-override: value of '" + key + "' is not a number");
        }
        if (!(val > 0.0))
            throw UsageError("--tol-override: '" + key + "' must be positive");
        const std::map<std::string, double*> reals{
            {"tol_ode", &td.tol_ode},   {"abs_ode", &td.abs_ode},       {"tol_shoot", &td.tol_shoot},
            {"tol_stab", &td.tol_stab}, {"tol_loop", &cont.tol_loop},   {"ds", &cont.ds},
            {"ds_min", &cont.ds_min},   {"ds_max", &cont.ds_max},       {"capture_radius", &basin.capture_radius}};
        if (auto it = reals.find(key); it != reals.end()) {
            *it->second = val;
            return;
        }
        if (key == "max_iter") {
            td.max_iter = static_cast<int>(val);
        } else if (key == "max_steps") {
            cont.max_steps = static_cast<std::size_t>(val);
        } else if (key == "max_periods") {
            basin.max_periods = static_cast<std::size_t>(val);
        } else {
            throw UsageError("--tol-override: unknown key '" + key + "'");
        }
    }

    void finalize() {
        cont.td = td;
        basin.td = td;
    }
};

/// Output directory bookkeeping; remembers what was written so a failure can
/// flag partial results.
class Output {
public:
    Output(fs::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {}

    bool json() const { return format_ == "json"; }

    template <class Fn>
    void file(const std::string& name, Fn&& fn) {
        fs::create_directories(dir_);
        const fs::path path = dir_ / name;
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        fn(os);
        if (!os)
            throw std::runtime_error("write to " + path.string() + " failed");
        written_.push_back(name);
    }

    void json_file(const std::string& name, const nlohmann::json& j) {
        file(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    void flag_incomplete(const std::string& command, const std::string& error) {
        if (written_.empty())
            return;
        try {
            fs::create_directories(dir_);
            std::ofstream os(dir_ / "INCOMPLETE.json");
            os << nlohmann::json{{"command", command}, {"error", error}, {"files", written_}}.dump(2) << '\n';
        } catch (...) {
        }
    }

private:
    fs::path dir_;
    std::string format_;
    std::vector<std::string> written_;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

struct ResponseArgs {
    LawArgs law;
    std::vector<std::string> f;
    double omega_min = 0.2;
    double omega_max = 2.0;
    std::size_t samples = 2000;
    bool stability = false;
    std::size_t stride = 10;
};

void cmd_response(const ResponseArgs& a, const Tolerances& tol, Output& out) {
    // split by hand: CLI11's delimiter drops empty fields, which must be rejected
    std::vector<std::string> items;
    for (const auto& arg : a.f) {
        std::size_t start = 0;
        for (std::size_t comma; (comma = arg.find(',', start)) != std::string::npos; start = comma + 1)
            items.push_back(arg.substr(start, comma - start));
        items.push_back(arg.substr(start));
    }
    std::vector<double> forcing;
    for (const auto& item : items) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
        }
        if (item.empty() || used != item.size() || !(v >= 0.0))
            throw UsageError("--f: expected a comma-separated list of nonnegative numbers, got '" + item + "'");
        forcing.push_back(v);
    }
    if (forcing.empty())
        throw UsageError("empty forcing list");
    const auto law = a.law.build();
    TraceOptions topts;
    topts.omega_min = a.omega_min;
    topts.omega_max = a.omega_max;
    topts.samples = a.samples;

    nlohmann::json summary = nlohmann::json::array();
    std::vector<std::array<std::string, 5>> rows;
    for (std::size_t k = 0; k < forcing.size(); ++k) {
        const double f = forcing[k];
        auto branches = trace_frequency_response(law, f, topts);
        if (a.stability)
            for (auto& b : branches)
                annotate_stability(law, f, b, a.stride, tol.td);
        std::size_t folds = 0;
        for (const auto& b : branches)
            if (b.kind == BranchKind::main)
                folds += omega_reversals(b);
        const std::size_t iso = count_isolated(branches);
        const std::string name = "response_" + std::to_string(k);
        if (out.json())
            out.json_file(name + ".json", branches_json(branches, f));
        else
            out.file(name + ".csv", [&](std::ostream& os) { write_branches_csv(os, branches); });
        summary.push_back({{"f", f},
                           {"file", name + (out.json() ? ".json" : ".csv")},
                           {"branches", branches.size()},
                           {"isolated", iso},
                           {"main_folds", folds}});
        rows.push_back({csv_number(f), std::to_string(branches.size()), std::to_string(iso), std::to_string(folds),
                        name + (out.json() ? ".json" : ".csv")});
        std::cout << "f=" << num(f) << " branches=" << branches.size() << " isolated=" << iso
                  << " main_folds=" << folds << '\n';
    }
    if (out.json())
        out.json_file("response_summary.json", {{"law", law.to_config()}, {"responses", summary}});
    else
        out.file("response_summary.csv", [&](std::ostream& os) {
            os << "f,branches,isolated,main_folds,file\n";
            for (const auto& r : rows)
                os << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << '\n';
        });
}

struct SingularArgs {
    double c1 = 0.1;
    double c3 = -0.6;
};

void cmd_singular(const SingularArgs& a, Output& out) {
    const Params p{a.c1, a.c3};
    validate(p);
    auto points = closed_form_singularities(p);
    for (const auto& h : hysteresis_points(p)) {
        SingularPoint s;
        s.kind = SingularityKind::hysteresis;
        s.label = SingularLabel::numeric;
        s.A = h.A;
        s.Omega = h.Omega;
        s.F = h.f * h.f;
        s.hessian_det = eval_hessian_det(h.A, h.Omega, p);
        points.push_back(s);
    }
    const auto t = thresholds(p.c1);
    std::cout << "zone " << zone(p) << " (c31=" << num(t.c31) << ", c32=" << num(t.c32) << ")\n";
    for (const auto& s : points)
        std::cout << to_string(s.label) << ' ' << to_string(s.kind) << " x=" << num(s.x_peak()) << " f=" << num(s.f())
                  << " Omega=" << num(s.Omega) << '\n';
    if (out.json())
        out.json_file("singular.json", singular_json(p, points));
    else
        out.file("singular.csv", [&](std::ostream& os) { write_singular_csv(os, points); });
}

struct RegionArgs {
    double c1 = 0.1;
    double c3_min = -1.0;
    double c3_max = -0.3;
    double f_max = 0.12;
    std::size_t resolution = 200;
    std::size_t zone_columns = 6;
};

void cmd_regions(const RegionArgs& a, Output& out) {
    RegionOptions opts;
    opts.zone_columns = a.zone_columns;
    const auto chart = region_chart(a.c1, {a.c3_min, a.c3_max}, {0.0, a.f_max}, a.resolution, opts);
    std::cout << "isola curves " << chart.isola_curves.size() << ", simple bifurcation curves "
              << chart.simple_bif_curves.size() << ", hysteresis curves " << chart.hysteresis_curves.size() << '\n';
    for (const auto& p : chart.special_points)
        std::cout << p.name << " c3=" << num(p.c3) << " f=" << num(p.f) << '\n';
    for (const auto& n : chart.notices)
        std::cout << "notice: " << n << '\n';
    if (out.json()) {
        out.json_file("regions.json", region_json(chart));
        return;
    }
    for (const auto* group : {&chart.isola_curves, &chart.simple_bif_curves, &chart.hysteresis_curves})
        for (const auto& c : *group)
            out.file("region_" + c.name + ".csv", [&](std::ostream& os) { write_curve_csv(os, c); });
    out.file("region_special_points.csv", [&](std::ostream& os) { write_special_points_csv(os, chart); });
    out.file("region_zones.csv", [&](std::ostream& os) { write_zones_csv(os, chart); });
}

struct PredictArgs {
    LawArgs law;
    double x0_max = 0.0;
    std::size_t resolution = 0;
    std::size_t samples = 2000;
};

void cmd_predict(const PredictArgs& a, Output& out) {
    const auto law = a.law.build();
    double x_max = a.x0_max;
    if (!(x_max > 0.0))
        x_max = amplitude_bound(law, 0.0).value_or(10.0);
    const auto curve = sample_averaged_damping(law, x_max, a.samples);
    const auto events = predict_irc_events(law, x_max, a.resolution);
    const auto merges = merge_ordering(events);
    for (const auto& e : events)
        std::cout << to_string(e.kind) << " x0=" << num(e.x0) << " f=" << num(e.f) << ' '
                  << to_string(e.stability_hint) << '\n';
    for (const auto& m : merges)
        std::cout << "merge " << merge_label(m) << " @ f=" << num(m.event.f) << '\n';
    if (out.json()) {
        auto j = events_json(events, merges);
        j["law"] = law.to_config();
        j["curve"] = {{"x0", curve.x0}, {"fd", curve.fd}};
        out.json_file("predict.json", j);
        return;
    }
    out.file("averaged_damping.csv", [&](std::ostream& os) { write_averaged_damping_csv(os, curve); });
    out.file("events.csv", [&](std::ostream& os) { write_events_csv(os, events, merges); });
}

struct BasinArgs {
    LawArgs law;
    double f = 0.009;
    double omega = 1.0;
    BasinWindow window;
    std::size_t resolution = 101;
};

/// All periodic orbits at (f, omega) seeded from the harmonic-balance amplitudes.
std::vector<PeriodicOrbit> orbits_at(const DampingLaw& law, double f, double omega, const TimeDomainOptions& td) {
    const double x_max = amplitude_bound(law, 2.0 * f).value_or(10.0) / std::min(omega, 1.0);
    std::vector<PeriodicOrbit> orbits;
    for (double X : hb_amplitudes(law, omega, f, x_max)) {
        try {
            const auto [x0, v0] = harmonic_initial_state(law, X, omega, f);
            auto o = shoot(law, f, omega, {x0, v0, 0.0}, td);
            const bool dup = std::any_of(orbits.begin(), orbits.end(), [&](const PeriodicOrbit& q) {
                return std::hypot(q.initial.x - o.initial.x, q.initial.v - o.initial.v) < 1e-6;
            });
            if (!dup)
                orbits.push_back(o);
        } catch (const NumericalError&) {
        }
    }
    return orbits;
}

void cmd_basin(const BasinArgs& a, const Tolerances& tol, unsigned threads, Output& out) {
    const auto law = a.law.build();
    const auto orbits = orbits_at(law, a.f, a.omega, tol.td);
    for (const auto& o : orbits)
        std::cout << "orbit amplitude=" << num(o.amplitude) << (o.stable ? " stable" : " unstable") << '\n';
    BasinOptions bopts = tol.basin;
    bopts.threads = threads;
    const auto grid = basin_grid(law, a.f, a.omega, orbits, a.window, a.resolution, bopts);
    std::cout << "attractors " << grid.attractors.size() << ", undecided fraction " << num(grid.undecided_fraction)
              << '\n';
    if (out.json()) {
        auto j = basin_legend_json(grid);
        auto labels = nlohmann::json::array();
        for (std::size_t r = 0; r < grid.ny; ++r) {
            std::vector<int> line(grid.labels.begin() + static_cast<long>(r * grid.nx),
                                  grid.labels.begin() + static_cast<long>((r + 1) * grid.nx));
            labels.push_back(line);
        }
        j["labels"] = std::move(labels);
        out.json_file("basin.json", j);
        return;
    }
    out.file("basin.csv", [&](std::ostream& os) { write_basin_csv(os, grid); });
    out.json_file("basin_legend.json", basin_legend_json(grid));
}

struct VerifyArgs {
    LawArgs law;
    bool numerical = false;
    double x_max = 0.0;
};

void cmd_verify(const VerifyArgs& a, const Tolerances& tol, Output& out) {
    VerifyOptions opts;
    opts.numerical = a.numerical;
    opts.x_max = a.x_max;
    opts.continuation = tol.cont;
    const auto table = verify_table(a.law.build(), opts);
    auto cell = [](const VerifyCell& c) {
        return c.available() ? "(" + num(c.x) + "," + num(c.y) + ")" : std::string("-");
    };
    std::cout << "quantity | numerical | singularity | damping | averaged_damping\n";
    for (const auto& r : table.rows)
        std::cout << r.quantity << " | " << cell(r.numerical) << " | " << cell(r.singularity) << " | "
                  << cell(r.damping) << " | " << cell(r.averaged_damping) << '\n';
    for (const auto& n : table.notes)
        std::cout << "note: " << n << '\n';
    if (out.json())
        out.json_file("verify.json", verify_json(table));
    else
        out.file("verify.csv", [&](std::ostream& os) { write_verify_csv(os, table); });
}

struct IntegrateArgs {
    LawArgs law;
    double f = 0.009;
    double omega = 1.0;
    double x0 = 0.0;
    double v0 = 0.38;
    double periods = 100.0;
    std::size_t samples = 64;
};

void cmd_integrate(const IntegrateArgs& a, const Tolerances& tol, Output& out) {
    const auto tr = integrate(a.law.build(), a.f, a.omega, {a.x0, a.v0, 0.0}, a.periods, a.samples, tol.td);
    double peak = 0.0;
    const std::size_t tail = std::min<std::size_t>(tr.x.size(), a.samples * 10);
    for (std::size_t i = tr.x.size() - tail; i < tr.x.size(); ++i)
        peak = std::max(peak, std::abs(tr.x[i]));
    std::cout << "samples " << tr.t.size() << ", max |x| over the last 10 periods " << num(peak) << '\n';
    if (out.json())
        out.json_file("trajectory.json", {{"t", tr.t}, {"x", tr.x}, {"v", tr.v}});
    else
        out.file("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
}

struct ContinueArgs {
    LawArgs law;
    double f = 0.008;
    double omega = 1.0;
    double x_peak = 0.6;
    std::string param = "omega";
    double p_min = 0.5;
    double p_max = 1.5;
    int direction = 1;
};

void cmd_continue(const ContinueArgs& a, const Tolerances& tol, Output& out) {
    const auto law = a.law.build();
    const auto [x0, v0] = harmonic_initial_state(law, a.x_peak, a.omega, a.f);
    const auto start = shoot(law, a.f, a.omega, {x0, v0, 0.0}, tol.td);
    ContinuationOptions opts = tol.cont;
    opts.param = a.param == "f" ? ContinuationParam::f : ContinuationParam::omega;
    opts.p_min = a.p_min;
    opts.p_max = a.p_max;
    opts.direction = a.direction;
    const auto branch = continue_branch(law, start, opts);
    std::size_t folds = 0, ns = 0;
    for (const auto& p : branch.points) {
        folds += p.fold;
        ns += p.neimark_sacker;
    }
    std::cout << "points " << branch.points.size() << ", " << to_string(branch.termination) << ", closed "
              << (branch.closed ? "yes" : "no") << ", folds " << folds << ", Neimark-Sacker " << ns << '\n';
    if (!branch.diagnostic.empty())
        std::cout << "diagnostic: " << branch.diagnostic << '\n';
    if (out.json())
        out.json_file("orbit_branch.json", orbit_branch_json(branch));
    else
        out.file("orbit_branch.csv", [&](std::ostream& os) { write_orbit_branch_csv(os, branch); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isolated resonance curves of an oscillator with nonlinear damping"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI configuration file; command-line flags take precedence");
    app.allow_config_extras(false);

    std::string out_dir = ".";
    std::string format = "csv";
    unsigned threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "Worker thread cap (0: all cores)");
    app.add_option("--tol-override", overrides, "Tolerance override key=val (repeatable)");

    ResponseArgs response;
    auto* s_response = app.add_subcommand("response", "Harmonic-balance frequency responses");
    add_law_options(s_response, response.law);
    s_response->add_option("--f", response.f, "Forcing amplitudes (comma separated)")->required();
    s_response->add_option("--omega-min", response.omega_min);
    s_response->add_option("--omega-max", response.omega_max);
    s_response->add_option("--samples", response.samples, "Samples per response");
    s_response->add_flag("--stability", response.stability, "Stability of every stride-th sample by shooting");
    s_response->add_option("--stability-stride", response.stride);

    SingularArgs singular;
    auto* s_singular = app.add_subcommand("singular", "Closed-form singular points and hysteresis points");
    s_singular->add_option("--c1", singular.c1);
    s_singular->add_option("--c3", singular.c3);

    RegionArgs regions;
    auto* s_regions = app.add_subcommand("regions", "Region chart in the (c3, f) plane");
    s_regions->add_option("--c1", regions.c1);
    s_regions->add_option("--c3-min", regions.c3_min);
    s_regions->add_option("--c3-max", regions.c3_max);
    s_regions->add_option("--f-max", regions.f_max);
    s_regions->add_option("--resolution", regions.resolution, "c3 samples of the singular curves");
    s_regions->add_option("--zone-columns", regions.zone_columns);

    PredictArgs predict;
    auto* s_predict = app.add_subcommand("predict", "IRC onset and merge prediction from the averaged damping");
    add_law_options(s_predict, predict.law);
    s_predict->add_option("--x0max", predict.x0_max, "Amplitude range (0: automatic)");
    s_predict->add_option("--resolution", predict.resolution, "Scan cells (0: default)");
    s_predict->add_option("--samples", predict.samples, "Samples of the exported curve");

    BasinArgs basin;
    auto* s_basin = app.add_subcommand("basin", "Basins of attraction on the Poincare section");
    add_law_options(s_basin, basin.law);
    s_basin->add_option("--f", basin.f);
    s_basin->add_option("--omega", basin.omega);
    s_basin->add_option("--x-min", basin.window.x_min);
    s_basin->add_option("--x-max", basin.window.x_max);
    s_basin->add_option("--v-min", basin.window.v_min);
    s_basin->add_option("--v-max", basin.window.v_max);
    s_basin->add_option("--resolution", basin.resolution, "Cells per axis");

    VerifyArgs verify;
    auto* s_verify = app.add_subcommand("verify", "Onset/merge comparison table");
    add_law_options(s_verify, verify.law);
    s_verify->add_flag("--numerical", verify.numerical, "Fill the time-domain column (slow)");
    s_verify->add_option("--x-max", verify.x_max, "Amplitude range (0: automatic)");

    IntegrateArgs integ;
    auto* s_integrate = app.add_subcommand("integrate", "Time series from an initial state");
    add_law_options(s_integrate, integ.law);
    s_integrate->add_option("--f", integ.f);
    s_integrate->add_option("--omega", integ.omega);
    s_integrate->add_option("--x0", integ.x0);
    s_integrate->add_option("--v0", integ.v0);
    s_integrate->add_option("--periods", integ.periods);
    s_integrate->add_option("--samples-per-period", integ.samples);

    ContinueArgs cont;
    auto* s_continue = app.add_subcommand("continue", "Periodic-orbit continuation from a harmonic-balance seed");
    add_law_options(s_continue, cont.law);
    s_continue->add_option("--f", cont.f);
    s_continue->add_option("--omega", cont.omega);
    s_continue->add_option("--x-peak", cont.x_peak, "Seed amplitude");
    s_continue->add_option("--param", cont.param)->check(CLI::IsMember({"omega", "f"}));
    s_continue->add_option("--p-min", cont.p_min);
    s_continue->add_option("--p-max", cont.p_max);
    s_continue->add_option("--direction", cont.direction)->check(CLI::IsMember({-1, 1}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Output out(out_dir, format);
    try {
        Tolerances tol;
        for (const auto& kv : overrides)
            tol.apply(kv);
        tol.finalize();
        if (sub == s_response)
            cmd_response(response, tol, out);
        else if (sub == s_singular)
            cmd_singular(singular, out);
        else if (sub == s_regions)
            cmd_regions(regions, out);
        else if (sub == s_predict)
            cmd_predict(predict, out);
        else if (sub == s_basin)
            cmd_basin(basin, tol, threads, out);
        else if (sub == s_verify)
            cmd_verify(verify, tol, out);
        else if (sub == s_integrate)
            cmd_integrate(integ, tol, out);
        else if (sub == s_continue)
            cmd_continue(cont, tol, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << name << ": " << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << name << ": " << e.what() << '\n';
        out.flag_incomplete(name, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << name << ": " << e.what() << '\n';
        out.flag_incomplete(name, e.what());
        return 1;
    }
    return 0;
}
