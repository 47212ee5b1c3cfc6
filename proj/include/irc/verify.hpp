// Four-way comparison of IRC onset and merge points: time-domain numerics,
// closed-form singularities, extrema of the raw damping force and of the
// averaged damping.
#pragma once

#include "irc/model.hpp"
#include "irc/timedomain.hpp"

#include <limits>
#include <string>
#include <vector>

namespace irc {

struct VerifyCell {
    double x = std::numeric_limits<double>::quiet_NaN();
    double y = std::numeric_limits<double>::quiet_NaN();  ///< 2f, or Fd for the damping column

    bool available() const { return x == x; }
};

struct VerifyRow {
    std::string quantity;
    VerifyCell numerical;
    VerifyCell singularity;
    VerifyCell damping;
    VerifyCell averaged_damping;
};

struct VerifyTable {
    std::vector<VerifyRow> rows;
    std::vector<std::string> notes;
};

struct VerifyOptions {
    bool numerical = false;  ///< time-domain column (seconds, not milliseconds)
    double x_max = 0.0;      ///< amplitude scan limit; 0 picks one from the law
    double rel_tol = 1e-4;   ///< bisection tolerance on f
    ContinuationOptions continuation{};
};

/// Rows follow the averaged-damping events: onsets first, then merges, each
/// by increasing amplitude.
VerifyTable verify_table(const DampingLaw& law, const VerifyOptions& opts = {});

}  // namespace irc
