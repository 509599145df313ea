#include "bipolar_formation/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "bipolar_formation/logging.hpp"
#include "bipolar_formation/oracles.hpp"

namespace bform {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw FormationError(ErrorCode::kValidation, msg);
}

PpcChannel with_override(const std::map<std::string, BoundOverride>& bounds,
                         const std::string& name, const PerformanceFunction& perf, double e0,
                         const std::function<PpcChannel()>& select, bool* used_default) {
  const auto it = bounds.find(name);
  if (it == bounds.end() || (!it->second.b_lower && !it->second.b_upper)) {
    *used_default = true;
    return select();
  }
  *used_default = false;
  PpcChannel ch;
  ch.perf = perf;
  if (it->second.b_lower && it->second.b_upper) {
    ch.b_lower = *it->second.b_lower;
    ch.b_upper = *it->second.b_upper;
  } else {
    ch = select();
    if (it->second.b_lower) ch.b_lower = *it->second.b_lower;
    if (it->second.b_upper) ch.b_upper = *it->second.b_upper;
  }
  if (!(ch.b_lower > 0.0 && ch.b_upper > 0.0)) {
    invalid("bounds for channel " + name + " must be positive");
  }
  require_initial_containment(ch, e0, name.c_str());
  return ch;
}

void check_perf(const PerformanceFunction& perf, const char* what) {
  if (!(perf.l > 0.0) || !(perf.rho_inf > 0.0 && perf.rho_inf <= 1.0)) {
    invalid(std::string("performance function for ") + what +
            " needs l > 0 and 0 < rho_inf <= 1");
  }
}

struct Stage {
  std::vector<Vec2> velocities;
};

std::vector<Vec2> axpy(const std::vector<Vec2>& p, double h, const std::vector<Vec2>& k) {
  std::vector<Vec2> out(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) out[a] = p[a] + k[a] * h;
  return out;
}

// Advances positions given the derivative already evaluated at (t, p).
std::vector<Vec2> advance(const PreparedScenario& scn, const std::vector<Vec2>& p, double t,
                          double dt, const std::vector<Vec2>& k1) {
  if (scn.config.integrator == Integrator::kEuler) return axpy(p, dt, k1);
  const auto k2 = evaluate(scn, axpy(p, 0.5 * dt, k1), t + 0.5 * dt).velocities;
  const auto k3 = evaluate(scn, axpy(p, 0.5 * dt, k2), t + 0.5 * dt).velocities;
  const auto k4 = evaluate(scn, axpy(p, dt, k3), t + dt).velocities;
  std::vector<Vec2> out(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) {
    out[a] = p[a] + (k1[a] + k2[a] * 2.0 + k3[a] * 2.0 + k4[a]) * (dt / 6.0);
  }
  return out;
}

LogRow make_row(const PreparedScenario& scn, const std::vector<Vec2>& positions, double t,
                Evaluation&& eval) {
  LogRow row;
  row.t = t;
  row.positions = positions;
  row.commands = std::move(eval.commands);
  row.channels = std::move(eval.channels);
  const auto& edges = scn.config.graph.edges();
  row.edge_distances.reserve(edges.size());
  for (const auto& e : edges) {
    row.edge_distances.push_back((positions[e.to - 1] - positions[e.from - 1]).norm());
  }
  row.edge_angles.reserve(scn.followers.size());
  for (AgentId k : scn.followers) {
    const auto& nb = scn.neighbors.at(k);
    const Vec2 z_ki = bearing(positions[k - 1], positions[nb.i - 1]);
    const Vec2 z_kj = bearing(positions[k - 1], positions[nb.j - 1]);
    row.edge_angles.push_back(edge_angle(z_ki, z_kj));
  }
  return row;
}

RunSummary summarize(const PreparedScenario& scn, const TrajectoryLog& log) {
  RunSummary s;
  const auto& cfg = scn.config;
  s.scenario = cfg.name;
  s.seed = cfg.seed;
  s.integrator = to_string(cfg.integrator);
  s.horizon = cfg.horizon;
  s.dt = cfg.dt;
  s.rows = log.rows.size();
  const double steady_start = 0.9 * cfg.horizon;
  s.min_neighbor_distance = std::numeric_limits<double>::infinity();
  for (const auto& row : log.rows) {
    for (double d : row.edge_distances) s.min_neighbor_distance = std::min(s.min_neighbor_distance, d);
  }
  for (std::size_t c = 0; c < scn.channels.size(); ++c) {
    const auto& info = scn.channels[c];
    ChannelSummary cs;
    cs.name = info.name;
    cs.agent = info.agent;
    cs.b_lower = info.channel.b_lower;
    cs.b_upper = info.channel.b_upper;
    cs.l = info.channel.perf.l;
    cs.rho_inf = info.channel.perf.rho_inf;
    cs.default_bounds = info.default_bounds;
    std::size_t steady_rows = 0;
    std::size_t in_band = 0;
    for (const auto& row : log.rows) {
      const auto& st = row.channels[c];
      cs.max_abs_e_tilde = std::max(cs.max_abs_e_tilde, std::abs(st.e_tilde));
      const double normalized =
          st.e_tilde >= 0.0 ? st.e_tilde / cs.b_upper : -st.e_tilde / cs.b_lower;
      cs.max_normalized_e_tilde = std::max(cs.max_normalized_e_tilde, normalized);
      if (row.t >= steady_start) {
        ++steady_rows;
        cs.steady_state_max_abs_e = std::max(cs.steady_state_max_abs_e, std::abs(st.e));
        if (st.e > -cs.b_lower * cs.rho_inf && st.e < cs.b_upper * cs.rho_inf) ++in_band;
      }
    }
    cs.steady_state_band_occupancy =
        steady_rows > 0 ? static_cast<double>(in_band) / static_cast<double>(steady_rows) : 0.0;
    if (cs.max_normalized_e_tilde >= 1.0) s.bound_violation = true;
    s.channels.push_back(cs);
  }
  if (log.rows.empty()) s.min_neighbor_distance = 0.0;
  return s;
}

}  // namespace

const char* to_string(Integrator integrator) {
  return integrator == Integrator::kEuler ? "euler" : "rk4";
}

std::vector<double> random_frame_rotations(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = dist(rng);
  return out;
}

PreparedScenario prepare(const ScenarioConfig& config) {
  PreparedScenario scn;
  scn.config = config;
  const auto& graph = config.graph;
  const int n = graph.agent_count();
  if (n < 2) invalid("a scenario needs at least two agents");
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) invalid("dt must be positive");
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    invalid("horizon must be positive");
  }
  if (config.dt > config.horizon) invalid("dt must not exceed the horizon");
  if (static_cast<int>(config.initial_positions.size()) != n) {
    std::ostringstream os;
    os << "expected " << n << " initial positions, got " << config.initial_positions.size();
    invalid(os.str());
  }
  for (const auto& [agent, sched] : config.disturbances) {
    (void)sched;
    if (agent < 1 || agent > n) invalid("disturbance given for unknown agent");
  }
  check_perf(config.ppc.distance, "distance");
  check_perf(config.ppc.bearing, "bearing");
  check_perf(config.ppc.ratio, "ratio");
  check_perf(config.ppc.angle, "angle");

  scn.report = validate_graph(graph);
  if (!scn.report.ok()) invalid(scn.report.to_string());
  scn.report = validate_desired(graph, config.desired);
  if (!scn.report.ok()) invalid(scn.report.to_string());
  for (const auto& w : scn.report.warnings) log_message(LogLevel::kWarn, w);

  scn.d21 = config.d21_reference ? *config.d21_reference
                                 : ReferenceSchedule::constant(config.desired.distance(2, 1));
  if (!(scn.d21.value(0.0) > 0.0)) invalid("d*_21(0) must be positive");
  scn.beta = config.beta_reference;

  if (config.frame_rotations) {
    if (static_cast<int>(config.frame_rotations->size()) != n) {
      invalid("frame rotation list must have one angle per agent");
    }
    scn.frame_rotations = *config.frame_rotations;
  } else {
    scn.frame_rotations = random_frame_rotations(n, config.seed);
  }

  scn.followers = construction_order(graph);
  for (AgentId k : scn.followers) {
    scn.neighbors[k] = *graph.follower_neighbors(k);
    scn.targets[k] = FollowerTarget{config.desired.r_star.at(k), config.desired.alpha_star.at(k)};
  }

  const auto& p = config.initial_positions;
  for (const auto& e : graph.edges()) {
    if (!((p[e.to - 1] - p[e.from - 1]).norm() > kEpsPos)) {
      std::ostringstream os;
      os << "agents " << e.from << " and " << e.to << " start collocated";
      invalid(os.str());
    }
  }

  const BoundGrid grid{config.horizon, 0.01};
  const ReferenceFn d_ref = [&](double t) { return scn.d21.value(t); };

  // Secondary leader.
  const double dist21 = (p[0] - p[1]).norm();
  const double d0 = scn.d21.value(0.0);
  const double e_d0 = dist21 * dist21 - d0 * d0;
  bool dflt = true;
  scn.secondary.distance = with_override(
      config.bounds, "d", config.ppc.distance, e_d0,
      [&] { return select_bounds_distance(d_ref, config.ppc.distance, e_d0, grid); }, &dflt);
  scn.channels.push_back({"d", 2, ChannelKind::kDistance, scn.secondary.distance, dflt});
  if (scn.beta) {
    const ReferenceFn b_ref = [&](double t) { return scn.beta->value(t); };
    SecondaryLeaderSnapshot s0;
    s0.z_21 = bearing(p[1], p[0]);
    s0.reference_rotation = config.orientation_frame_rotation;
    const double e_b0 = bearing_angle(s0) - scn.beta->value(0.0);
    scn.secondary.bearing = with_override(
        config.bounds, "beta", config.ppc.bearing, e_b0,
        [&] { return select_bounds_bearing(b_ref, config.ppc.bearing, e_b0, grid); }, &dflt);
    scn.channels.push_back({"beta", 2, ChannelKind::kBearing, *scn.secondary.bearing, dflt});
  }

  for (AgentId k : scn.followers) {
    const auto& nb = scn.neighbors[k];
    const auto& target = scn.targets[k];
    const Vec2 p_ki = p[nb.i - 1] - p[k - 1];
    const Vec2 p_kj = p[nb.j - 1] - p[k - 1];
    if (!(p_ki.norm() > kEpsPos && p_kj.norm() > kEpsPos)) {
      invalid("follower " + std::to_string(k) + " starts collocated with a neighbor");
    }
    const double e_r0 = std::log(p_ki.norm() / p_kj.norm()) - target.r_star;
    const double e_a0 = edge_angle(p_ki / p_ki.norm(), p_kj / p_kj.norm()) - target.alpha_star;
    const std::string rk = "r" + std::to_string(k);
    const std::string ak = "alpha" + std::to_string(k);
    FollowerChannels fc;
    fc.ratio = with_override(
        config.bounds, rk, config.ppc.ratio, e_r0,
        [&] { return select_bounds_ratio(config.ppc.ratio, e_r0); }, &dflt);
    scn.channels.push_back({rk, k, ChannelKind::kRatio, fc.ratio, dflt});
    fc.angle = with_override(
        config.bounds, ak, config.ppc.angle, e_a0,
        [&] { return select_bounds_angle(target.alpha_star, config.ppc.angle, e_a0); }, &dflt);
    if (fc.angle.b_lower > target.alpha_star || fc.angle.b_upper > kTwoPi - target.alpha_star) {
      invalid("edge-angle bounds for " + ak + " would let the angle leave (0, 2pi)");
    }
    scn.channels.push_back({ak, k, ChannelKind::kAngle, fc.angle, dflt});
    scn.follower_channels[k] = fc;
  }
  for (const auto& [name, ov] : config.bounds) {
    (void)ov;
    const bool known = std::any_of(scn.channels.begin(), scn.channels.end(),
                                   [&](const ChannelInfo& c) { return c.name == name; });
    if (!known) invalid("bound override for unknown channel " + name);
  }
  return scn;
}

SensingSnapshot sense(const WorldState& world, const FormationGraph& graph, AgentId agent,
                      double frame_rot) {
  const auto& p = world.positions;
  if (agent == 1) return std::monostate{};
  if (agent == 2) {
    SecondaryLeaderSnapshot s;
    const Vec2 p_21 = p[0] - p[1];
    s.z_21 = rotate(-frame_rot, bearing(p[1], p[0]));
    s.dist_21 = p_21.norm();
    return s;
  }
  const auto nb = graph.follower_neighbors(agent);
  if (!nb) {
    throw FormationError(ErrorCode::kInvalidArgument,
                         "agent " + std::to_string(agent) + " is not a follower");
  }
  FollowerSnapshot s;
  const Vec2 p_k = p[agent - 1];
  const Vec2 p_i = p[nb->i - 1];
  const Vec2 p_j = p[nb->j - 1];
  s.z_ki = rotate(-frame_rot, bearing(p_k, p_i));
  s.z_kj = rotate(-frame_rot, bearing(p_k, p_j));
  s.ratio_kij = (p_i - p_k).norm() / (p_j - p_k).norm();
  return s;
}

Evaluation evaluate(const PreparedScenario& scn, const std::vector<Vec2>& positions, double t) {
  const auto& cfg = scn.config;
  const int n = cfg.graph.agent_count();
  Evaluation ev;
  ev.commands.resize(static_cast<std::size_t>(n));
  ev.channels.reserve(scn.channels.size());
  const WorldState world{t, positions};

  AgentId agent = 1;
  try {
    ev.commands[0] = control_leader(cfg.leader_velocity, t).velocity;

    agent = 2;
    const double th2 = scn.frame_rotations[1];
    auto s2 = std::get<SecondaryLeaderSnapshot>(sense(world, cfg.graph, 2, th2));
    s2.d_star = scn.d21.value(t);
    s2.d_star_rate = scn.d21.rate(t);
    if (scn.beta) s2.beta_star = scn.beta->value(t);
    s2.reference_rotation = cfg.orientation_frame_rotation - th2;
    const auto out2 = evaluate_secondary(s2, scn.secondary, t);
    ev.commands[1] = rotate(th2, out2.command.velocity);
    ev.channels.push_back(out2.distance);
    if (out2.bearing) ev.channels.push_back(*out2.bearing);

    for (AgentId k : scn.followers) {
      agent = k;
      const double th = scn.frame_rotations[k - 1];
      const auto sk = std::get<FollowerSnapshot>(sense(world, cfg.graph, k, th));
      const auto out =
          evaluate_follower(sk, scn.follower_channels.at(k), scn.targets.at(k), t, k);
      ev.commands[k - 1] = rotate(th, out.command.velocity);
      ev.channels.push_back(out.ratio);
      ev.channels.push_back(out.angle);
    }
  } catch (const OutOfBoundsError& err) {
    throw AgentFault(ErrorCode::kOutOfBounds, agent, t, err.channel(), err.what());
  } catch (const AgentFault&) {
    throw;
  } catch (const FormationError& err) {
    std::ostringstream os;
    os << "agent " << agent << " at t=" << t << ": " << err.what();
    throw AgentFault(err.code(), agent, t, "", os.str());
  }

  ev.velocities = ev.commands;
  for (const auto& [a, sched] : cfg.disturbances) ev.velocities[a - 1] += disturbance(sched, t);
  return ev;
}

WorldState step(const WorldState& world, const PreparedScenario& scn, double dt) {
  const auto k1 = evaluate(scn, world.positions, world.t).velocities;
  return {world.t + dt, advance(scn, world.positions, world.t, dt, k1)};
}

double frame_invariance_deviation(const PreparedScenario& scn,
                                  const std::vector<Vec2>& positions, double t,
                                  const std::vector<double>& rotations) {
  PreparedScenario turned = scn;
  turned.frame_rotations = rotations;
  PreparedScenario aligned = scn;
  aligned.frame_rotations.assign(rotations.size(), 0.0);
  const auto a = evaluate(turned, positions, t).commands;
  const auto b = evaluate(aligned, positions, t).commands;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(1.0, b[i].norm());
    worst = std::max(worst, (a[i] - b[i]).norm() / scale);
  }
  return worst;
}

long step_count(const ScenarioConfig& config) {
  return std::lround(config.horizon / config.dt);
}

RunResult run(const PreparedScenario& scn) {
  const auto started = std::chrono::steady_clock::now();
  const auto& cfg = scn.config;
  RunResult result;
  auto& log = result.log;
  log.agents = cfg.graph.agent_count();
  log.edges = cfg.graph.edges();
  log.followers = scn.followers;
  log.channels = scn.channels;

  const long steps = step_count(cfg);
  log.rows.reserve(static_cast<std::size_t>(steps) + 1);
  std::vector<Vec2> positions = cfg.initial_positions;
  std::optional<RunFailure> failure;

  for (long s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) * cfg.dt;
    try {
      Evaluation ev = evaluate(scn, positions, t);
      const auto k1 = ev.velocities;
      log.rows.push_back(make_row(scn, positions, t, std::move(ev)));
      if (s == steps) break;
      positions = advance(scn, positions, t, cfg.dt, k1);
    } catch (const AgentFault& err) {
      failure = RunFailure{err.code(), err.what(), err.channel(), err.agent(), err.time()};
      break;
    }
  }

  result.summary = summarize(scn, log);
  result.summary.completed = !failure.has_value();
  if (failure) {
    if (failure->code == ErrorCode::kOutOfBounds) result.summary.bound_violation = true;
    log_message(LogLevel::kError, failure->message);
  }
  result.summary.failure = failure;
  const auto elapsed = std::chrono::steady_clock::now() - started;
  result.summary.wall_clock_seconds = std::chrono::duration<double>(elapsed).count();
  std::ostringstream os;
  os << "run " << cfg.name << ": " << log.rows.size() << " rows in "
     << result.summary.wall_clock_seconds << " s";
  log_message(LogLevel::kInfo, os.str());
  return result;
}

RunResult run(const ScenarioConfig& config) { return run(prepare(config)); }

std::vector<Vec2> sample_feasible_start(const ScenarioConfig& config, std::mt19937_64& rng,
                                        double spread, int max_tries) {
  const auto& graph = config.graph;
  const int n = graph.agent_count();
  std::uniform_real_distribution<double> offset(-spread, spread);
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& [edge, d] : config.desired.d_star) {
    (void)edge;
    shortest = std::min(shortest, d);
  }
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    auto target = reconstruct_target_positions(graph, config.desired, Vec2{0.0, 0.0}, heading(rng));
    for (int a = 1; a < n; ++a) {
      target[a] += Vec2{offset(rng), offset(rng)};
    }
    bool spaced = true;
    for (const auto& e : graph.edges()) {
      if ((target[e.to - 1] - target[e.from - 1]).norm() <= 0.2 * shortest) spaced = false;
    }
    if (!spaced) continue;
    ScenarioConfig trial = config;
    trial.initial_positions = target;
    try {
      prepare(trial);
      return target;
    } catch (const FormationError&) {
    }
  }
  throw FormationError(ErrorCode::kInfeasibleInitialError,
                       "no feasible initial configuration found");
}

}  // namespace bform
