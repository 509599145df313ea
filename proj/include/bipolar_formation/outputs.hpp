#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bipolar_formation/simulation.hpp"
#include "json.hpp"

namespace bform {

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

/// Columns: t, x1, y1, ..., xn, yn, ux1, uy1, ..., d_<from>_<to> per edge,
/// alpha_<k> per follower.
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out);

/// Columns: t, then per channel e_<c>, rho_<c>, lower_<c>, upper_<c>, sigma_<c>
/// where lower = -b rho and upper = b-bar rho.
void write_errors_csv(const TrajectoryLog& log, std::ostream& out);

nlohmann::json summary_to_json(const RunSummary& summary, const ScenarioConfig& config);

/// Agent paths with the formation drawn at the given times.
std::string trajectory_svg(const TrajectoryLog& log, const std::vector<double>& snapshot_times);

/// One panel per channel: the error against its dashed bounds.
std::string channel_plot_svg(const TrajectoryLog& log, const std::vector<std::string>& channels,
                             const std::string& title);

/// File names written by write_outputs, in order.
const std::vector<std::string>& output_file_names();

/// Writes every output file into `dir` (created if missing).
void write_outputs(const RunResult& result, const ScenarioConfig& config, const std::string& dir);

}  // namespace bform
