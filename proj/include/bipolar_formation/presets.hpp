#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bipolar_formation/formation_graph.hpp"
#include "bipolar_formation/schedules.hpp"
#include "bipolar_formation/simulation.hpp"

namespace bform {

/// Six agents forming an equilateral triangle of four equilateral
/// sub-triangles with side 1.875.
Formation sec4_formation();

/// Random triangulated formation grown by attaching each new agent to a
/// random existing edge.
Formation random_henneberg_formation(int n, std::uint64_t seed);

/// u_L(t) = [1.25, (pi/4) cos(pi t / 6)].
VelocitySchedule sec4_leader_velocity();

/// d*_21: 1.875 until t = 16, quintic shrink to 1.25 by t = 19, held, then
/// back to 1.875 over [23, 26].
ReferenceSchedule sec4_distance_reference();

/// beta*: 0 until t = 13, then blends over 1 s into the leader heading
/// minus pi/6.
ReferenceSchedule sec4_bearing_reference();

double reference_d21(double t);
double reference_beta(double t);

std::vector<std::string> preset_names();

/// Complete scenario for a named preset. `n` and `seed` are used by
/// random_henneberg only. Throws kInvalidArgument for unknown names.
ScenarioConfig make_preset(const std::string& name, int n = 10, std::uint64_t seed = 7);

}  // namespace bform
