#include "irc/verify.hpp"

#include "irc/energybalance.hpp"
#include "irc/singularity.hpp"

#include <algorithm>
#include <cmath>

namespace irc {

namespace {

bool is_onset(const IRCEvent& e) { return e.kind == EventKind::onset_zero || e.kind == EventKind::onset_min; }

void split(const std::vector<IRCEvent>& events, std::vector<IRCEvent>& onsets, std::vector<IRCEvent>& merges) {
    for (const auto& e : events)
        (is_onset(e) ? onsets : merges).push_back(e);
}

std::string label(const IRCEvent& e, std::size_t k) {
    const std::string n = std::to_string(k + 1);
    switch (e.kind) {
    case EventKind::onset_zero: return "Onset " + n + " / zero";
    case EventKind::onset_min: return "Onset " + n + " / minimum";
    case EventKind::merge_max: return "Merge " + n + " / maximum";
    case EventKind::merge_min_between_zeros: return "Merge " + n + " / minimum";
    }
    return "?";
}

}  // namespace

VerifyTable verify_table(const DampingLaw& law, const VerifyOptions& opts) {
    double x_max = opts.x_max;
    if (!(x_max > 0.0))
        x_max = amplitude_bound(law, 0.0).value_or(10.0);

    VerifyTable table;
    std::vector<IRCEvent> onsets, merges, d_onsets, d_merges;
    split(predict_irc_events(law, x_max, 2000), onsets, merges);
    split(damping_force_events(law, x_max, 2000), d_onsets, d_merges);

    std::vector<SingularPoint> isolas, bifurcations;
    if (law.kind() == LawKind::quintic) {
        for (const auto& s : closed_form_singularities(Params{law.c1(), law.c3()})) {
            if (s.kind == SingularityKind::simple_bifurcation)
                bifurcations.push_back(s);
            else if (s.kind != SingularityKind::regular && s.kind != SingularityKind::fold)
                isolas.push_back(s);
        }
        auto by_x = [](const SingularPoint& a, const SingularPoint& b) { return a.A < b.A; };
        std::sort(isolas.begin(), isolas.end(), by_x);
        std::sort(bifurcations.begin(), bifurcations.end(), by_x);
        if (isolas.size() != onsets.size() || bifurcations.size() != merges.size())
            table.notes.emplace_back("singularity count differs from the averaged-damping events");
    } else {
        table.notes.emplace_back("closed-form singularities exist only for the quintic law");
    }
    if (d_onsets.size() != onsets.size() || d_merges.size() != merges.size())
        table.notes.emplace_back("damping-force features differ in number from the averaged-damping events");

    auto add_rows = [&](const std::vector<IRCEvent>& ev, const std::vector<IRCEvent>& dev,
                        const std::vector<SingularPoint>& sing, std::size_t offset) {
        for (std::size_t k = 0; k < ev.size(); ++k) {
            VerifyRow row;
            row.quantity = label(ev[k], offset + k);
            row.averaged_damping = {ev[k].x0, 2.0 * ev[k].f};
            if (k < dev.size())
                row.damping = {dev[k].x0, 2.0 * dev[k].f};
            if (k < sing.size())
                row.singularity = {sing[k].x_peak(), 2.0 * sing[k].f()};
            table.rows.push_back(row);
        }
    };
    add_rows(onsets, d_onsets, isolas, 0);
    add_rows(merges, d_merges, bifurcations, 0);

    if (!opts.numerical)
        return table;

    for (std::size_t k = 0; k < onsets.size(); ++k) {
        auto& row = table.rows[k];
        if (onsets[k].kind != EventKind::onset_zero) {
            table.notes.push_back(row.quantity + ": numerical onset at positive forcing is not computed");
            continue;
        }
        try {
            const auto lc = limit_cycle(law, onsets[k].x0, opts.continuation.td);
            row.numerical = {lc.amplitude, 0.0};
        } catch (const NumericalError& e) {
            table.notes.push_back(row.quantity + ": " + e.what());
        }
    }
    for (std::size_t k = 0; k < merges.size(); ++k) {
        auto& row = table.rows[onsets.size() + k];
        const auto& m = merges[k];
        // The loop that disappears at this merge is born at the next onset above it.
        double x_birth = -1.0;
        for (const auto& o : onsets)
            if (o.x0 > m.x0 && (x_birth < 0.0 || o.x0 < x_birth))
                x_birth = o.x0;
        if (x_birth < 0.0 || !(m.f > 0.0)) {
            table.notes.push_back(row.quantity + ": no isolated loop above the merge point");
            continue;
        }
        auto seed = [&](double f) { return seeds_at_resonance(law, f, {x_birth})[0].x_peak; };
        bool done = false;
        std::string last_error;
        for (double width : {0.15, 0.3, 0.5}) {
            try {
                const auto r = bisect_irc_merge(law, seed, m.f * (1.0 - width), m.f * (1.0 + width), opts.continuation,
                                                opts.rel_tol, 0.9 * m.x0);
                row.numerical = {r.x_peak, 2.0 * r.f};
                done = true;
                break;
            } catch (const NumericalError& e) {
                last_error = e.what();
            }
        }
        if (!done)
            table.notes.push_back(row.quantity + ": " + last_error);
    }
    return table;
}

}  // namespace irc
