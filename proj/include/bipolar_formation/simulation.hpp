#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "bipolar_formation/controllers.hpp"
#include "bipolar_formation/error.hpp"
#include "bipolar_formation/formation_graph.hpp"
#include "bipolar_formation/geometry.hpp"
#include "bipolar_formation/ppc.hpp"
#include "bipolar_formation/schedules.hpp"

namespace bform {

enum class Integrator { kEuler, kRk4 };

const char* to_string(Integrator integrator);

// Performance functions per channel type.
struct ChannelParameters {
  PerformanceFunction distance{0.5, 0.04};
  PerformanceFunction bearing{0.5, 0.04};
  PerformanceFunction ratio{0.5, 0.04};
  PerformanceFunction angle{0.5, 0.04};
};

// Explicit b / b-bar for one channel, keyed by channel name ("d", "beta",
// "r3", "alpha3", ...). Unset values fall back to the selection rules.
struct BoundOverride {
  std::optional<double> b_lower;
  std::optional<double> b_upper;
};

struct ScenarioConfig {
  std::string name = "scenario";
  FormationGraph graph;
  DesiredFormation desired;
  std::vector<Vec2> initial_positions;  // agent k at index k - 1
  double horizon = 40.0;
  double dt = 1e-3;
  Integrator integrator = Integrator::kRk4;
  std::map<AgentId, DisturbanceSchedule> disturbances;  // absent agents: zero
  VelocitySchedule leader_velocity;
  std::optional<ReferenceSchedule> d21_reference;  // default: constant d*_21
  std::optional<ReferenceSchedule> beta_reference;  // enables orientation control
  // Rotation of the world-fixed frame in which beta is measured.
  double orientation_frame_rotation = 0.0;
  ChannelParameters ppc;
  std::map<std::string, BoundOverride> bounds;
  // Fixed per-agent frame rotations; seeded-random when absent.
  std::optional<std::vector<double>> frame_rotations;
  std::uint64_t seed = 1;
  std::vector<double> snapshot_times;
};

enum class ChannelKind { kDistance, kBearing, kRatio, kAngle };

struct ChannelInfo {
  std::string name;
  AgentId agent = 0;
  ChannelKind kind = ChannelKind::kDistance;
  PpcChannel channel;
  bool default_bounds = true;
};

// A validated scenario with bounds fixed from the initial errors.
struct PreparedScenario {
  ScenarioConfig config;
  ValidationReport report;
  ReferenceSchedule d21;
  std::optional<ReferenceSchedule> beta;
  SecondaryLeaderChannels secondary;
  std::vector<AgentId> followers;  // construction order
  std::map<AgentId, FollowerNeighbors> neighbors;
  std::map<AgentId, FollowerTarget> targets;
  std::map<AgentId, FollowerChannels> follower_channels;
  std::vector<double> frame_rotations;  // per agent, index k - 1
  std::vector<ChannelInfo> channels;    // d, [beta], r3, alpha3, r4, ...
};

/// Validates graph, desired shape and initial positions, then selects the
/// PPC bounds. Throws FormationError with kValidation (report text in what())
/// or kInfeasibleInitialError.
PreparedScenario prepare(const ScenarioConfig& config);

/// Per-agent frame rotations drawn uniformly from [0, 2pi) with mt19937_64.
std::vector<double> random_frame_rotations(int n, std::uint64_t seed);

struct WorldState {
  double t = 0.0;
  std::vector<Vec2> positions;
};

using SensingSnapshot = std::variant<std::monostate, SecondaryLeaderSnapshot, FollowerSnapshot>;

/// Measurements of `agent` expressed in its local frame, which is turned by
/// `frame_rot` from the world frame. The leader senses nothing. Secondary
/// leader references are left at zero.
SensingSnapshot sense(const WorldState& world, const FormationGraph& graph, AgentId agent,
                      double frame_rot);

// Thrown when an agent's controller fails during a run.
class AgentFault : public FormationError {
 public:
  AgentFault(ErrorCode code, AgentId agent, double t, std::string channel,
             const std::string& what)
      : FormationError(code, what), agent_(agent), t_(t), channel_(std::move(channel)) {}

  AgentId agent() const noexcept { return agent_; }
  double time() const noexcept { return t_; }
  const std::string& channel() const noexcept { return channel_; }

 private:
  AgentId agent_;
  double t_;
  std::string channel_;
};

struct Evaluation {
  std::vector<Vec2> commands;    // world frame
  std::vector<Vec2> velocities;  // commands plus disturbances
  std::vector<ChannelState> channels;
};

/// Runs every agent's controller at time t.
Evaluation evaluate(const PreparedScenario& scn, const std::vector<Vec2>& positions, double t);

/// One integration step of length dt.
WorldState step(const WorldState& world, const PreparedScenario& scn, double dt);

/// Largest deviation between world-frame commands computed with `rotations`
/// and with all frames aligned to the world.
double frame_invariance_deviation(const PreparedScenario& scn,
                                  const std::vector<Vec2>& positions, double t,
                                  const std::vector<double>& rotations);

struct LogRow {
  double t = 0.0;
  std::vector<Vec2> positions;
  std::vector<Vec2> commands;
  std::vector<ChannelState> channels;
  std::vector<double> edge_distances;  // order of graph.edges()
  std::vector<double> edge_angles;     // order of followers
};

struct TrajectoryLog {
  int agents = 0;
  std::vector<Edge> edges;
  std::vector<AgentId> followers;
  std::vector<ChannelInfo> channels;
  std::vector<LogRow> rows;
};

struct ChannelSummary {
  std::string name;
  AgentId agent = 0;
  double b_lower = 0.0;
  double b_upper = 0.0;
  double l = 0.0;
  double rho_inf = 0.0;
  bool default_bounds = true;
  double max_abs_e_tilde = 0.0;
  // max of e_tilde / b-bar or -e_tilde / b; below 1 means in-band.
  double max_normalized_e_tilde = 0.0;
  double steady_state_max_abs_e = 0.0;
  double steady_state_band_occupancy = 0.0;
};

struct RunFailure {
  ErrorCode code = ErrorCode::kOutOfBounds;
  std::string message;
  std::string channel;
  AgentId agent = 0;
  double t = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string integrator;
  double horizon = 0.0;
  double dt = 0.0;
  std::size_t rows = 0;
  bool completed = false;
  bool bound_violation = false;
  std::optional<RunFailure> failure;
  std::vector<ChannelSummary> channels;
  double min_neighbor_distance = 0.0;
  double wall_clock_seconds = 0.0;
};

struct RunResult {
  TrajectoryLog log;
  RunSummary summary;
};

/// Number of steps round(T / dt).
long step_count(const ScenarioConfig& config);

/// Integrates over the horizon. A controller failure ends the run early; the
/// rows logged so far are kept and the failure is reported in the summary.
RunResult run(const PreparedScenario& scn);
RunResult run(const ScenarioConfig& config);

/// Samples initial positions around the target shape (uniform offsets of
/// at most `spread` per axis) until prepare() accepts them and every edge is
/// longer than a fifth of its desired length.
std::vector<Vec2> sample_feasible_start(const ScenarioConfig& config, std::mt19937_64& rng,
                                        double spread, int max_tries = 1000);

}  // namespace bform
