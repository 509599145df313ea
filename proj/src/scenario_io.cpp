#include "bipolar_formation/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "bipolar_formation/error.hpp"

namespace bform {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& msg) {
  throw FormationError(ErrorCode::kParse, msg);
}

json series_to_json(const ScalarSeries& s) {
  json terms = json::array();
  for (const auto& t : s.terms) {
    terms.push_back({{"amplitude", t.amplitude},
                     {"frequency", t.frequency},
                     {"phase", t.phase},
                     {"fn", t.cosine ? "cos" : "sin"}});
  }
  return {{"offset", s.offset}, {"terms", terms}};
}

json vector_series_to_json(const VectorSeries& v) {
  return {{"x", series_to_json(v.x)}, {"y", series_to_json(v.y)}};
}

ScalarSeries series_from_json(const json& j) {
  ScalarSeries s;
  if (j.is_number()) {
    s.offset = j.get<double>();
    return s;
  }
  s.offset = j.value("offset", 0.0);
  const json terms = j.value("terms", json::array());
  for (const auto& t : terms) {
    SinusoidTerm term;
    term.amplitude = t.at("amplitude").get<double>();
    term.frequency = t.value("frequency", 0.0);
    term.phase = t.value("phase", 0.0);
    const std::string fn = t.value("fn", std::string("sin"));
    if (fn != "sin" && fn != "cos") parse_error("sinusoid fn must be sin or cos");
    term.cosine = fn == "cos";
    s.terms.push_back(term);
  }
  return s;
}

VectorSeries vector_series_from_json(const json& j) {
  VectorSeries v;
  if (j.contains("x")) v.x = series_from_json(j.at("x"));
  if (j.contains("y")) v.y = series_from_json(j.at("y"));
  return v;
}

json reference_to_json(const ReferenceSchedule& r) {
  if (r.kind() == ReferenceSchedule::Kind::kHeadingTracking) {
    return {{"type", "heading_tracking"},
            {"hold_value", r.initial()},
            {"hold_until", r.hold_until()},
            {"blend", r.blend()},
            {"offset", r.offset()}};
  }
  if (r.segments().empty()) return {{"type", "constant"}, {"value", r.initial()}};
  json segs = json::array();
  for (const auto& s : r.segments()) segs.push_back({{"t0", s.t0}, {"t1", s.t1}, {"to", s.to}});
  return {{"type", "smooth_piecewise"}, {"initial", r.initial()}, {"segments", segs}};
}

ReferenceSchedule reference_from_json(const json& j, const VelocitySchedule& leader,
                                      double frame_rotation) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return ReferenceSchedule::constant(j.at("value").get<double>());
  if (type == "smooth_piecewise") {
    std::vector<SmoothSegment> segs;
    const json segments = j.value("segments", json::array());
    for (const auto& s : segments) {
      segs.push_back({s.at("t0").get<double>(), s.at("t1").get<double>(),
                      s.at("to").get<double>()});
    }
    return ReferenceSchedule::piecewise(j.at("initial").get<double>(), std::move(segs));
  }
  if (type == "heading_tracking") {
    return ReferenceSchedule::heading_tracking(
        j.value("hold_value", 0.0), j.at("hold_until").get<double>(), j.value("blend", 1.0),
        j.value("offset", 0.0), leader, frame_rotation);
  }
  parse_error("unknown reference type '" + type + "'");
}

json perf_to_json(const PerformanceFunction& p) { return {{"l", p.l}, {"rho_inf", p.rho_inf}}; }

PerformanceFunction perf_from_json(const json& j, const PerformanceFunction& fallback) {
  return {j.value("l", fallback.l), j.value("rho_inf", fallback.rho_inf)};
}

AgentId agent_key(const std::string& key) {
  try {
    std::size_t used = 0;
    const int id = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return id;
  } catch (const std::exception&) {
    parse_error("expected an agent id, got '" + key + "'");
  }
}

ScenarioConfig parse_document(const json& doc) {
  ScenarioConfig cfg;
  cfg.name = doc.value("name", std::string("scenario"));
  const int n = doc.at("agents").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : doc.at("edges")) {
    if (!e.is_array() || e.size() != 2) parse_error("edges must be [from, to] pairs");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  cfg.graph = FormationGraph(n, std::move(edges));

  const auto& des = doc.at("desired");
  for (const auto& d : des.at("d_star")) {
    if (!d.is_array() || d.size() != 3) parse_error("d_star entries must be [from, to, value]");
    cfg.desired.d_star[{d[0].get<int>(), d[1].get<int>()}] = d[2].get<double>();
  }
  const json alpha_star = des.value("alpha_star", json::object());
  for (const auto& [key, v] : alpha_star.items()) {
    cfg.desired.alpha_star[agent_key(key)] = v.get<double>();
  }
  if (des.contains("r_star")) {
    for (const auto& [key, v] : des.at("r_star").items()) {
      cfg.desired.r_star[agent_key(key)] = v.get<double>();
    }
  }
  // Missing log-ratios follow from the distances.
  for (const auto& [k, alpha] : cfg.desired.alpha_star) {
    (void)alpha;
    if (cfg.desired.r_star.count(k)) continue;
    const auto nb = cfg.graph.follower_neighbors(k);
    if (!nb) continue;
    const auto ki = cfg.desired.d_star.find({k, nb->i});
    const auto kj = cfg.desired.d_star.find({k, nb->j});
    if (ki != cfg.desired.d_star.end() && kj != cfg.desired.d_star.end()) {
      cfg.desired.r_star[k] = std::log(ki->second / kj->second);
    }
  }

  for (const auto& p : doc.at("initial_positions")) {
    if (!p.is_array() || p.size() != 2) parse_error("positions must be [x, y] pairs");
    cfg.initial_positions.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  cfg.horizon = doc.value("horizon", cfg.horizon);
  cfg.dt = doc.value("dt", cfg.dt);
  const std::string integrator = doc.value("integrator", std::string("rk4"));
  if (integrator == "rk4") {
    cfg.integrator = Integrator::kRk4;
  } else if (integrator == "euler") {
    cfg.integrator = Integrator::kEuler;
  } else {
    parse_error("integrator must be rk4 or euler");
  }
  if (doc.contains("leader_velocity")) {
    cfg.leader_velocity = vector_series_from_json(doc.at("leader_velocity"));
  }
  const json disturbances = doc.value("disturbances", json::object());
  for (const auto& [key, v] : disturbances.items()) {
    cfg.disturbances[agent_key(key)] = vector_series_from_json(v);
  }

  const json refs = doc.value("references", json::object());
  cfg.orientation_frame_rotation = refs.value("orientation_frame_rotation", 0.0);
  if (refs.contains("d21") && !refs.at("d21").is_null()) {
    cfg.d21_reference =
        reference_from_json(refs.at("d21"), cfg.leader_velocity, cfg.orientation_frame_rotation);
  }
  if (refs.contains("beta") && !refs.at("beta").is_null()) {
    cfg.beta_reference =
        reference_from_json(refs.at("beta"), cfg.leader_velocity, cfg.orientation_frame_rotation);
  }

  const json ppc = doc.value("ppc", json::object());
  cfg.ppc.distance = perf_from_json(ppc.value("distance", json::object()), cfg.ppc.distance);
  cfg.ppc.bearing = perf_from_json(ppc.value("bearing", json::object()), cfg.ppc.bearing);
  cfg.ppc.ratio = perf_from_json(ppc.value("ratio", json::object()), cfg.ppc.ratio);
  cfg.ppc.angle = perf_from_json(ppc.value("angle", json::object()), cfg.ppc.angle);
  const json bounds = ppc.value("bounds", json::object());
  for (const auto& [name, b] : bounds.items()) {
    BoundOverride ov;
    if (b.contains("b_lower") && !b.at("b_lower").is_null()) ov.b_lower = b.at("b_lower").get<double>();
    if (b.contains("b_upper") && !b.at("b_upper").is_null()) ov.b_upper = b.at("b_upper").get<double>();
    cfg.bounds[name] = ov;
  }

  const json frames = doc.value("frames", json{{"mode", "random"}});
  const std::string mode = frames.value("mode", std::string("random"));
  if (mode == "fixed") {
    cfg.frame_rotations = frames.at("angles").get<std::vector<double>>();
  } else if (mode == "identity") {
    cfg.frame_rotations = std::vector<double>(static_cast<std::size_t>(n), 0.0);
  } else if (mode != "random") {
    parse_error("frames.mode must be random, fixed or identity");
  }
  cfg.seed = doc.value("seed", cfg.seed);
  const json output = doc.value("output", json::object());
  cfg.snapshot_times = output.value("snapshot_times", std::vector<double>{});
  return cfg;
}

}  // namespace

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["agents"] = cfg.graph.agent_count();
  json edges = json::array();
  for (const auto& e : cfg.graph.edges()) edges.push_back({e.from, e.to});
  doc["edges"] = edges;
  json d_star = json::array();
  for (const auto& [e, v] : cfg.desired.d_star) d_star.push_back({e.from, e.to, v});
  json alpha = json::object();
  for (const auto& [k, v] : cfg.desired.alpha_star) alpha[std::to_string(k)] = v;
  json r = json::object();
  for (const auto& [k, v] : cfg.desired.r_star) r[std::to_string(k)] = v;
  doc["desired"] = {{"d_star", d_star}, {"alpha_star", alpha}, {"r_star", r}};
  json pos = json::array();
  for (const auto& p : cfg.initial_positions) pos.push_back({p.x, p.y});
  doc["initial_positions"] = pos;
  doc["horizon"] = cfg.horizon;
  doc["dt"] = cfg.dt;
  doc["integrator"] = to_string(cfg.integrator);
  doc["leader_velocity"] = vector_series_to_json(cfg.leader_velocity);
  json dist = json::object();
  for (const auto& [k, v] : cfg.disturbances) dist[std::to_string(k)] = vector_series_to_json(v);
  doc["disturbances"] = dist;
  json refs;
  refs["d21"] = cfg.d21_reference ? reference_to_json(*cfg.d21_reference) : json(nullptr);
  refs["beta"] = cfg.beta_reference ? reference_to_json(*cfg.beta_reference) : json(nullptr);
  refs["orientation_frame_rotation"] = cfg.orientation_frame_rotation;
  doc["references"] = refs;
  json bounds = json::object();
  for (const auto& [name, ov] : cfg.bounds) {
    json b = json::object();
    if (ov.b_lower) b["b_lower"] = *ov.b_lower;
    if (ov.b_upper) b["b_upper"] = *ov.b_upper;
    bounds[name] = b;
  }
  doc["ppc"] = {{"distance", perf_to_json(cfg.ppc.distance)},
                {"bearing", perf_to_json(cfg.ppc.bearing)},
                {"ratio", perf_to_json(cfg.ppc.ratio)},
                {"angle", perf_to_json(cfg.ppc.angle)},
                {"bounds", bounds}};
  if (cfg.frame_rotations) {
    doc["frames"] = {{"mode", "fixed"}, {"angles", *cfg.frame_rotations}};
  } else {
    doc["frames"] = {{"mode", "random"}};
  }
  doc["seed"] = cfg.seed;
  doc["output"] = {{"snapshot_times", cfg.snapshot_times}};
  return doc;
}

ScenarioConfig scenario_from_json(const json& doc) {
  if (!doc.is_object()) parse_error("scenario must be a JSON object");
  try {
    return parse_document(doc);
  } catch (const json::exception& err) {
    parse_error(std::string("malformed scenario: ") + err.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormationError(ErrorCode::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    parse_error(path + ": " + err.what());
  }
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormationError(ErrorCode::kIo, "cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw FormationError(ErrorCode::kIo, "write failed for " + path);
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_json(read_json_file(path));
}

void save_scenario(const ScenarioConfig& config, const std::string& path) {
  write_json_file(scenario_to_json(config), path);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw FormationError(ErrorCode::kInvalidArgument,
                         "override must look like key=value: '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw FormationError(ErrorCode::kInvalidArgument, "empty key segment");
    path.push_back(part);
  }
  for (std::size_t s = 0; s < path.size(); ++s) {
    const bool last = s + 1 == path.size();
    json* next = nullptr;
    if (node->is_array()) {
      std::size_t used = 0;
      std::size_t index = 0;
      try {
        index = std::stoul(path[s], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != path[s].size() || index >= node->size()) {
        throw FormationError(ErrorCode::kInvalidArgument,
                             "'" + path[s] + "' is not a valid index into " + key);
      }
      next = &(*node)[index];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) {
        throw FormationError(ErrorCode::kInvalidArgument,
                             "cannot descend into '" + path[s] + "' of " + key);
      }
      next = &(*node)[path[s]];
    }
    if (last) {
      *next = value;
    } else {
      node = next;
    }
  }
}

}  // namespace bform
