#include "irc/export.hpp"

#include <cmath>
#include <cstdio>

namespace irc {

std::string csv_number(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0.0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", value);
    return buf;
}

nlohmann::json json_number(double value) {
    if (!std::isfinite(value))
        return nullptr;
    return value;
}

namespace {

const char* bool_str(bool b) { return b ? "true" : "false"; }

template <class... T>
void row(std::ostream& os, const T&... fields) {
    bool first = true;
    ((os << (first ? "" : ",") << fields, first = false), ...);
    os << '\n';
}

nlohmann::json hysteresis_points_json(const std::vector<HysteresisPoint>& pts) {
    auto arr = nlohmann::json::array();
    for (const auto& p : pts)
        arr.push_back({{"c3", p.c3}, {"f", json_number(p.f)}, {"A", p.A}, {"omega", std::sqrt(p.Omega)}});
    return arr;
}

nlohmann::json curves_json(const std::vector<ChartCurve>& curves) {
    auto arr = nlohmann::json::array();
    for (const auto& c : curves)
        arr.push_back({{"name", c.name}, {"kind", to_string(c.kind)}, {"points", hysteresis_points_json(c.points)}});
    return arr;
}

std::string joins_for(const IRCEvent& e, const std::vector<MergeStep>& merges) {
    for (const auto& m : merges)
        if (m.event.x0 == e.x0 && m.event.kind == e.kind)
            return merge_label(m);
    return "";
}

nlohmann::json cell_json(const VerifyCell& c) { return {{"x", json_number(c.x)}, {"y", json_number(c.y)}}; }

}  // namespace

void write_branches_csv(std::ostream& os, const std::vector<ResponseBranch>& branches) {
    os << "omega,x_peak,A,branch_id,kind,closed,stability\n";
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        for (const auto& s : br.samples)
            row(os, csv_number(s.omega), csv_number(s.x_peak), csv_number(s.A), b, to_string(br.kind),
                bool_str(br.closed), to_string(s.stability));
    }
}

nlohmann::json branches_json(const std::vector<ResponseBranch>& branches, double f) {
    nlohmann::json out;
    out["f"] = f;
    out["isolated_count"] = count_isolated(branches);
    auto arr = nlohmann::json::array();
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& s : br.samples)
            samples.push_back({{"omega", s.omega},
                               {"x_peak", s.x_peak},
                               {"A", s.A},
                               {"branch_id", b},
                               {"kind", to_string(br.kind)},
                               {"closed", br.closed},
                               {"stability", to_string(s.stability)}});
        arr.push_back({{"branch_id", b},
                       {"kind", to_string(br.kind)},
                       {"closed", br.closed},
                       {"component", br.component},
                       {"samples", std::move(samples)}});
    }
    out["branches"] = std::move(arr);
    return out;
}

void write_singular_csv(std::ostream& os, const std::vector<SingularPoint>& points) {
    os << "label,kind,x_peak,f,A,Omega,F,hessian_det\n";
    for (const auto& s : points)
        row(os, to_string(s.label), to_string(s.kind), csv_number(s.x_peak()), csv_number(s.f()), csv_number(s.A),
            csv_number(s.Omega), csv_number(s.F), csv_number(s.hessian_det));
}

nlohmann::json singular_json(const Params& p, const std::vector<SingularPoint>& points) {
    const auto t = thresholds(p.c1);
    nlohmann::json out;
    out["c1"] = p.c1;
    out["c3"] = p.c3;
    out["zone"] = zone(p);
    out["thresholds"] = {{"c31", t.c31}, {"c32", t.c32}};
    auto arr = nlohmann::json::array();
    for (const auto& s : points)
        arr.push_back({{"label", to_string(s.label)},
                       {"kind", to_string(s.kind)},
                       {"x_peak", s.x_peak()},
                       {"f", s.f()},
                       {"A", s.A},
                       {"Omega", s.Omega},
                       {"F", s.F},
                       {"hessian_det", s.hessian_det}});
    out["points"] = std::move(arr);
    return out;
}

void write_curve_csv(std::ostream& os, const ChartCurve& curve) {
    os << "c3,f,A,omega,kind\n";
    for (const auto& p : curve.points)
        row(os, csv_number(p.c3), csv_number(p.f), csv_number(p.A), csv_number(std::sqrt(p.Omega)), to_string(curve.kind));
}

void write_special_points_csv(std::ostream& os, const RegionChart& chart) {
    os << "name,kind,c3,f,A\n";
    for (const auto& p : chart.special_points)
        row(os, p.name, to_string(p.kind), csv_number(p.c3), csv_number(p.f), csv_number(p.A));
}

void write_zones_csv(std::ostream& os, const RegionChart& chart) {
    os << "label,c3,f,isolated,main_folds\n";
    for (const auto& z : chart.zones)
        row(os, z.label, csv_number(z.c3), csv_number(z.f), z.isolated, z.main_folds);
}

nlohmann::json region_json(const RegionChart& chart) {
    nlohmann::json out;
    out["c1"] = chart.c1;
    out["isola_curves"] = curves_json(chart.isola_curves);
    out["simple_bifurcation_curves"] = curves_json(chart.simple_bif_curves);
    out["hysteresis_curves"] = curves_json(chart.hysteresis_curves);
    auto pts = nlohmann::json::array();
    for (const auto& p : chart.special_points)
        pts.push_back({{"name", p.name}, {"kind", to_string(p.kind)}, {"c3", p.c3}, {"f", p.f}, {"A", p.A}});
    out["special_points"] = std::move(pts);
    auto zones = nlohmann::json::array();
    for (const auto& z : chart.zones)
        zones.push_back({{"label", z.label},
                         {"c3", z.c3},
                         {"f", z.f},
                         {"isolated", z.isolated},
                         {"main_folds", z.main_folds}});
    out["zones"] = std::move(zones);
    out["notices"] = chart.notices;
    return out;
}

void write_averaged_damping_csv(std::ostream& os, const AveragedDampingCurve& curve) {
    os << "x0,fd\n";
    for (std::size_t i = 0; i < curve.x0.size(); ++i)
        row(os, csv_number(curve.x0[i]), csv_number(curve.fd[i]));
}

void write_events_csv(std::ostream& os, const std::vector<IRCEvent>& events, const std::vector<MergeStep>& merges) {
    os << "kind,x0,f,stability_hint,joins\n";
    for (const auto& e : events)
        row(os, to_string(e.kind), csv_number(e.x0), csv_number(e.f), to_string(e.stability_hint), joins_for(e, merges));
}

nlohmann::json events_json(const std::vector<IRCEvent>& events, const std::vector<MergeStep>& merges) {
    nlohmann::json out;
    auto arr = nlohmann::json::array();
    for (const auto& e : events)
        arr.push_back({{"kind", to_string(e.kind)},
                       {"x0", e.x0},
                       {"f", e.f},
                       {"stability_hint", to_string(e.stability_hint)},
                       {"joins", joins_for(e, merges)}});
    out["events"] = std::move(arr);
    auto seq = nlohmann::json::array();
    for (const auto& m : merges)
        seq.push_back({{"joins", merge_label(m)},
                       {"f", m.event.f},
                       {"x0", m.event.x0},
                       {"left_component", m.left_component},
                       {"right_component", m.right_component}});
    out["merge_sequence"] = std::move(seq);
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,x,v\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        row(os, csv_number(tr.t[i]), csv_number(tr.x[i]), csv_number(tr.v[i]));
}

nlohmann::json orbit_json(const PeriodicOrbit& o) {
    auto mu = nlohmann::json::array();
    for (const auto& m : o.multipliers)
        mu.push_back({{"re", m.real()}, {"im", m.imag()}});
    return {{"x0", o.initial.x},
            {"v0", o.initial.v},
            {"omega", o.omega},
            {"f", o.f},
            {"period", o.period},
            {"amplitude", o.amplitude},
            {"stable", o.stable},
            {"multipliers", std::move(mu)},
            {"residual", o.residual},
            {"far_from_seed", o.far_from_seed}};
}

void write_orbit_branch_csv(std::ostream& os, const OrbitBranch& branch) {
    os << to_string(branch.param) << ",amplitude,stable,fold_flag,ns_flag\n";
    for (const auto& p : branch.points)
        row(os, csv_number(p.param), csv_number(p.orbit.amplitude), bool_str(p.orbit.stable), bool_str(p.fold),
            bool_str(p.neimark_sacker));
}

nlohmann::json orbit_branch_json(const OrbitBranch& branch) {
    auto pts = nlohmann::json::array();
    for (const auto& p : branch.points)
        pts.push_back({{"param", p.param},
                       {"amplitude", p.orbit.amplitude},
                       {"stable", p.orbit.stable},
                       {"fold_flag", p.fold},
                       {"ns_flag", p.neimark_sacker}});
    return {{"param", to_string(branch.param)},
            {"closed", branch.closed},
            {"termination", to_string(branch.termination)},
            {"diagnostic", branch.diagnostic},
            {"points", std::move(pts)}};
}

void write_basin_csv(std::ostream& os, const BasinGrid& grid) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i)
            os << (i ? "," : "") << grid.label(i, j);
        os << '\n';
    }
}

nlohmann::json basin_legend_json(const BasinGrid& grid) {
    auto attractors = nlohmann::json::array();
    for (std::size_t k = 0; k < grid.attractors.size(); ++k) {
        auto o = orbit_json(grid.attractors[k]);
        o["label"] = k;
        attractors.push_back(std::move(o));
    }
    return {{"window",
             {{"x_min", grid.window.x_min},
              {"x_max", grid.window.x_max},
              {"v_min", grid.window.v_min},
              {"v_max", grid.window.v_max}}},
            {"nx", grid.nx},
            {"ny", grid.ny},
            {"undecided_label", -1},
            {"undecided_fraction", grid.undecided_fraction},
            {"attractors", std::move(attractors)}};
}

void write_verify_csv(std::ostream& os, const VerifyTable& table) {
    os << "quantity,numerical_x,numerical_y,singularity_x,singularity_y,damping_x,damping_y,averaged_damping_x,"
          "averaged_damping_y\n";
    for (const auto& r : table.rows)
        row(os, r.quantity, csv_number(r.numerical.x), csv_number(r.numerical.y), csv_number(r.singularity.x),
            csv_number(r.singularity.y), csv_number(r.damping.x), csv_number(r.damping.y),
            csv_number(r.averaged_damping.x), csv_number(r.averaged_damping.y));
}

nlohmann::json verify_json(const VerifyTable& table) {
    auto rows = nlohmann::json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"quantity", r.quantity},
                        {"numerical", cell_json(r.numerical)},
                        {"singularity", cell_json(r.singularity)},
                        {"damping", cell_json(r.damping)},
                        {"averaged_damping", cell_json(r.averaged_damping)}});
    return {{"columns", {"quantity", "numerical", "singularity", "damping", "averaged_damping"}},
            {"rows", std::move(rows)},
            {"notes", table.notes}};
}

}  // namespace irc
