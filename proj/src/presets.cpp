#include "bipolar_formation/presets.hpp"

#include <cmath>
#include <random>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/oracles.hpp"

namespace bform {

namespace {

constexpr double kSec4Side = 1.875;

SinusoidTerm sin_term(double amplitude, double frequency, double phase) {
  return {amplitude, frequency, phase, false};
}

SinusoidTerm cos_term(double amplitude, double frequency, double phase) {
  return {amplitude, frequency, phase, true};
}

std::map<AgentId, DisturbanceSchedule> sec4_disturbances() {
  const ScalarSeries a{0.0, {sin_term(0.75, 4.0, kPi / 5.0), sin_term(0.5, 2.0, 3.0 * kPi / 4.0)}};
  const ScalarSeries b{0.0, {cos_term(0.25, 3.0, kPi / 3.0), sin_term(0.75, 2.0, -kPi / 5.0)}};
  std::map<AgentId, DisturbanceSchedule> out;
  out[2] = {a, b};
  out[3] = {ScalarSeries{0.0, {sin_term(0.75, 1.0, 0.0)}},
            ScalarSeries{0.0, {cos_term(0.25, 1.0, kPi / 6.0), sin_term(0.25, 2.0, kPi / 4.0)}}};
  out[4] = {ScalarSeries{0.0, {cos_term(0.5, 5.0, kPi / 8.0), sin_term(0.5, 1.0, kPi / 5.0)}}, b};
  out[5] = {b, ScalarSeries{0.0, {cos_term(0.5, 1.0, 0.0)}}};
  out[6] = {ScalarSeries{0.0, {sin_term(0.5, 2.0, kPi / 4.0)}}, a};
  return out;
}

ScenarioConfig sec4_maneuver() {
  const Formation f = sec4_formation();
  ScenarioConfig cfg;
  cfg.name = "sec4_maneuver";
  cfg.graph = f.graph;
  cfg.desired = f.desired;
  // Scattered start; agent 2 begins about 2.7 from the leader.
  cfg.initial_positions = {{0.0, 0.0},  {-2.4, -1.25}, {-2.3, 1.6},
                           {-4.2, 0.9}, {-4.6, -1.7},  {-3.1, 3.0}};
  cfg.horizon = 40.0;
  cfg.dt = 1e-3;
  cfg.integrator = Integrator::kRk4;
  cfg.disturbances = sec4_disturbances();
  cfg.leader_velocity = sec4_leader_velocity();
  cfg.d21_reference = sec4_distance_reference();
  cfg.beta_reference = sec4_bearing_reference();
  cfg.ppc.distance = {0.5, 0.03};
  cfg.ppc.bearing = {0.5, 0.04};
  cfg.ppc.ratio = {0.5, 0.04};
  cfg.ppc.angle = {0.5, 0.04};
  cfg.seed = 1;
  cfg.snapshot_times = {0.0, 6.0, 13.0, 18.0, 22.0, 27.0, 33.0, 40.0};
  return cfg;
}

ScenarioConfig two_agents_static() {
  ScenarioConfig cfg;
  cfg.name = "two_agents_static";
  cfg.graph = FormationGraph::leader_pair();
  cfg.desired.d_star[{2, 1}] = 1.0;
  cfg.initial_positions = {{0.0, 0.0}, {-1.6, 0.8}};
  cfg.horizon = 10.0;
  cfg.dt = 1e-3;
  cfg.seed = 1;
  cfg.snapshot_times = {0.0, 2.0, 10.0};
  return cfg;
}

ScenarioConfig random_henneberg(int n, std::uint64_t seed) {
  const Formation f = random_henneberg_formation(n, seed);
  ScenarioConfig cfg;
  cfg.name = "random_henneberg";
  cfg.graph = f.graph;
  cfg.desired = f.desired;
  cfg.horizon = 20.0;
  cfg.dt = 2.5e-4;
  cfg.leader_velocity.x.offset = 0.5;
  cfg.seed = seed;
  cfg.snapshot_times = {0.0, 5.0, 10.0, 20.0};
  double shortest = 1e300;
  for (const auto& [edge, d] : cfg.desired.d_star) {
    (void)edge;
    shortest = std::min(shortest, d);
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  cfg.initial_positions = sample_feasible_start(cfg, rng, 0.3 * shortest);
  return cfg;
}

}  // namespace

Formation sec4_formation() {
  const FormationGraph graph(
      6, {{2, 1}, {3, 1}, {3, 2}, {4, 2}, {4, 3}, {5, 2}, {5, 4}, {6, 3}, {6, 4}});
  const double s = kSec4Side;
  const std::map<AgentId, FollowerSpec> specs{{3, {s, s, kPi / 3.0}},
                                              {4, {s, s, 5.0 * kPi / 3.0}},
                                              {5, {s, s, 5.0 * kPi / 3.0}},
                                              {6, {s, s, kPi / 3.0}}};
  return {graph, desired_from_follower_specs(graph, s, specs)};
}

Formation random_henneberg_formation(int n, std::uint64_t seed) {
  if (n < 2) throw FormationError(ErrorCode::kInvalidArgument, "need at least two agents");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> length(1.0, 2.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> turn(0.0, kTwoPi);
  Formation f;
  const double d21 = length(rng);
  f.graph = FormationGraph::leader_pair();
  f.desired.d_star[{2, 1}] = d21;
  std::vector<Vec2> p{{0.0, 0.0}, {-d21, 0.0}};
  for (int k = 3; k <= n; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) {
        throw FormationError(ErrorCode::kInvalidArgument, "could not place a new agent");
      }
      const auto& edges = f.graph.edges();
      const Edge e = edges[static_cast<std::size_t>(unit(rng) * edges.size()) % edges.size()];
      const AgentId i = std::min(e.from, e.to);
      const AgentId j = std::max(e.from, e.to);
      const Vec2 mid = (p[i - 1] + p[j - 1]) * 0.5;
      const double d_ji = (p[j - 1] - p[i - 1]).norm();
      const Vec2 cand = mid + rotate(turn(rng), Vec2{d_ji * (0.5 + 0.7 * unit(rng)), 0.0});
      const double d_ki = (p[i - 1] - cand).norm();
      const double d_kj = (p[j - 1] - cand).norm();
      if (std::min(d_ki, d_kj) < 0.6) continue;
      bool crowded = false;
      for (const auto& q : p) crowded = crowded || (q - cand).norm() < 0.6;
      if (crowded) continue;
      const double alpha = edge_angle(bearing(cand, p[i - 1]), bearing(cand, p[j - 1]));
      if (alpha < 0.35 || alpha > kTwoPi - 0.35 || std::abs(alpha - kPi) < 0.2) continue;
      f = henneberg_extend(f, i, j, d_ki, d_kj, alpha);
      p.push_back(cand);
      break;
    }
  }
  return f;
}

VelocitySchedule sec4_leader_velocity() {
  VelocitySchedule u;
  u.x.offset = 1.25;
  u.y.terms = {cos_term(kPi / 4.0, kPi / 6.0, 0.0)};
  return u;
}

ReferenceSchedule sec4_distance_reference() {
  return ReferenceSchedule::piecewise(kSec4Side, {{16.0, 19.0, 1.25}, {23.0, 26.0, kSec4Side}});
}

ReferenceSchedule sec4_bearing_reference() {
  return ReferenceSchedule::heading_tracking(0.0, 13.0, 1.0, -kPi / 6.0, sec4_leader_velocity());
}

double reference_d21(double t) { return sec4_distance_reference().value(t); }

double reference_beta(double t) { return sec4_bearing_reference().value(t); }

std::vector<std::string> preset_names() {
  return {"sec4_maneuver", "two_agents_static", "random_henneberg"};
}

ScenarioConfig make_preset(const std::string& name, int n, std::uint64_t seed) {
  if (name == "sec4_maneuver") return sec4_maneuver();
  if (name == "two_agents_static") return two_agents_static();
  if (name == "random_henneberg") return random_henneberg(n, seed);
  throw FormationError(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
}

}  // namespace bform
