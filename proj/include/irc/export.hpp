// CSV and JSON writers for every result type. CSV numbers use fixed
// 12-significant-digit scientific notation so identical runs give
// byte-identical files; JSON uses the shortest round-trip representation.
#pragma once

#include "irc/energybalance.hpp"
#include "irc/hbcore.hpp"
#include "irc/singularity.hpp"
#include "irc/timedomain.hpp"
#include "irc/verify.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace irc {

/// "%.11e"; non-finite values are written as "nan" / "inf" / "-inf".
std::string csv_number(double value);

/// JSON number, or null when not finite.
nlohmann::json json_number(double value);

// Frequency response (hbcore)
void write_branches_csv(std::ostream& os, const std::vector<ResponseBranch>& branches);
nlohmann::json branches_json(const std::vector<ResponseBranch>& branches, double f);

// Singular points
void write_singular_csv(std::ostream& os, const std::vector<SingularPoint>& points);
nlohmann::json singular_json(const Params& p, const std::vector<SingularPoint>& points);

// Region chart
void write_curve_csv(std::ostream& os, const ChartCurve& curve);
void write_special_points_csv(std::ostream& os, const RegionChart& chart);
void write_zones_csv(std::ostream& os, const RegionChart& chart);
nlohmann::json region_json(const RegionChart& chart);

// Averaged damping
void write_averaged_damping_csv(std::ostream& os, const AveragedDampingCurve& curve);
/// `joins` is the "a-b" valley pair for merges and empty for onsets.
void write_events_csv(std::ostream& os, const std::vector<IRCEvent>& events, const std::vector<MergeStep>& merges);
nlohmann::json events_json(const std::vector<IRCEvent>& events, const std::vector<MergeStep>& merges);

// Time domain
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
nlohmann::json orbit_json(const PeriodicOrbit& orbit);
/// Columns omega (or f),amplitude,stable,fold_flag,ns_flag.
void write_orbit_branch_csv(std::ostream& os, const OrbitBranch& branch);
nlohmann::json orbit_branch_json(const OrbitBranch& branch);
/// Label matrix: one line per v row (lowest v first), one column per x.
void write_basin_csv(std::ostream& os, const BasinGrid& grid);
nlohmann::json basin_legend_json(const BasinGrid& grid);

// Cross-check table
void write_verify_csv(std::ostream& os, const VerifyTable& table);
nlohmann::json verify_json(const VerifyTable& table);

}  // namespace irc
