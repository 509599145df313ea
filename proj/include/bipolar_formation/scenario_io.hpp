#pragma once

#include <string>

#include "bipolar_formation/simulation.hpp"
#include "json.hpp"

namespace bform {

// Scenario documents. Top-level keys:
//   name, agents, edges [[from,to],...],
//   desired {d_star [[from,to,value],...], alpha_star {"k": v}, r_star {"k": v}},
//   initial_positions [[x,y],...], horizon, dt, integrator ("rk4" | "euler"),
//   leader_velocity {x: series, y: series}, disturbances {"k": {x, y}},
//   references {d21: reference, beta: reference | null,
//               orientation_frame_rotation},
//   ppc {distance|bearing|ratio|angle: {l, rho_inf}, bounds {"name": {b_lower, b_upper}}},
//   frames {mode: "random" | "fixed" | "identity", angles [...]}, seed,
//   output {snapshot_times [...]}.
// A series is {offset, terms [{amplitude, frequency, phase, fn: "sin"|"cos"}]}.
// A reference is {type: "constant", value}, {type: "smooth_piecewise",
// initial, segments [{t0, t1, to}]} or {type: "heading_tracking",
// hold_value, hold_until, blend, offset}.

nlohmann::json scenario_to_json(const ScenarioConfig& config);

/// Throws FormationError(kParse) on malformed documents.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

/// Reads and parses a file. kIo if unreadable, kParse if malformed.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& doc, const std::string& path);

ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& config, const std::string& path);

/// Applies "a.b.c=value" to the document. The value is parsed as JSON when
/// possible and taken as a string otherwise. Missing objects are created;
/// numeric segments index into existing arrays.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace bform
