#include "bipolar_formation/formation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/geometry.hpp"

namespace bform {

namespace {

constexpr double kCosineRelTol = 1e-9;

std::string edge_name(const Edge& e) {
  std::ostringstream os;
  os << "(" << e.from << "," << e.to << ")";
  return os.str();
}

void add_violation(ValidationReport& report, std::string rule, std::string detail) {
  report.violations.push_back({std::move(rule), std::move(detail)});
}

}  // namespace

FormationGraph::FormationGraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {}

FormationGraph FormationGraph::leader_pair() { return FormationGraph(2, {{2, 1}}); }

bool FormationGraph::has_edge(AgentId from, AgentId to) const {
  return std::find(edges_.begin(), edges_.end(), Edge{from, to}) != edges_.end();
}

std::vector<AgentId> FormationGraph::out_neighbors(AgentId a) const {
  std::vector<AgentId> out;
  for (const Edge& e : edges_) {
    if (e.from == a) out.push_back(e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<FollowerNeighbors> FormationGraph::follower_neighbors(AgentId k) const {
  const auto out = out_neighbors(k);
  if (out.size() != 2) return std::nullopt;
  return FollowerNeighbors{out[0], out[1]};
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  if (ok()) os << "ok";
  for (const auto& v : violations) os << "violation [" << v.rule << "] " << v.detail << "\n";
  for (const auto& w : warnings) os << "warning " << w << "\n";
  return os.str();
}

ValidationReport validate_graph(const FormationGraph& graph) {
  ValidationReport report;
  const int n = graph.agent_count();
  if (n < 2) {
    add_violation(report, "agent-count", "n=" + std::to_string(n) + " < 2");
    return report;
  }

  for (const Edge& e : graph.edges()) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      add_violation(report, "vertex-range", "edge " + edge_name(e) + " references a missing vertex");
      continue;
    }
    if (e.from == e.to) {
      add_violation(report, "self-loop", "edge " + edge_name(e));
      continue;
    }
    if (!(e.to < e.from)) {
      add_violation(report, "edge-direction",
                    "edge " + edge_name(e) + " must point from the larger to the smaller index");
    }
    if (graph.has_edge(e.to, e.from)) {
      add_violation(report, "bidirectional", "edge " + edge_name(e) + " appears in both directions");
    }
  }
  auto sorted = graph.edges();
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    add_violation(report, "duplicate-edge", "edge list contains duplicates");
  }

  for (AgentId a = 1; a <= n; ++a) {
    const int expected = a == 1 ? 0 : (a == 2 ? 1 : 2);
    const auto out = graph.out_neighbors(a);
    if (static_cast<int>(out.size()) != expected) {
      add_violation(report, "out-degree",
                    "out(" + std::to_string(a) + ")=" + std::to_string(out.size()) +
                        "≠" + std::to_string(expected));
    }
  }
  if (n >= 2 && !graph.has_edge(2, 1)) {
    add_violation(report, "secondary-leader", "edge (2,1) is missing");
  }

  for (AgentId k = 3; k <= n; ++k) {
    const auto nb = graph.follower_neighbors(k);
    if (!nb) continue;
    if (!graph.has_edge(nb->j, nb->i)) {
      add_violation(report, "triangulation",
                    "follower " + std::to_string(k) + " senses " + std::to_string(nb->i) + " and " +
                        std::to_string(nb->j) + " but edge (" + std::to_string(nb->j) + "," +
                        std::to_string(nb->i) + ") is missing");
    }
  }

  const auto expected_edges = static_cast<std::size_t>(2 * n - 3);
  if (graph.edges().size() != expected_edges) {
    add_violation(report, "edge-count",
                  "|E|=" + std::to_string(graph.edges().size()) + "≠" +
                      std::to_string(expected_edges));
  }
  return report;
}

double DesiredFormation::distance(AgentId from, AgentId to) const {
  const auto it = d_star.find({from, to});
  if (it == d_star.end()) {
    throw FormationError(ErrorCode::kInvalidArgument,
                         "no desired distance for edge " + edge_name({from, to}));
  }
  return it->second;
}

double law_of_cosines_residual(double d_ji, double d_ki, double d_kj, double alpha) {
  const double predicted = d_ki * d_ki + d_kj * d_kj - 2.0 * d_ki * d_kj * std::cos(alpha);
  return std::abs(d_ji * d_ji - predicted) / (d_ji * d_ji);
}

ValidationReport validate_desired(const FormationGraph& graph,
                                  const DesiredFormation& desired) {
  ValidationReport report;
  for (const Edge& e : graph.edges()) {
    const auto it = desired.d_star.find(e);
    if (it == desired.d_star.end()) {
      add_violation(report, "missing-distance", "no d* for edge " + edge_name(e));
    } else if (!(it->second > 0.0) || !std::isfinite(it->second)) {
      add_violation(report, "distance-positive", "d* of edge " + edge_name(e) + " must be > 0");
    }
  }
  if (!report.ok()) return report;

  for (AgentId k = 3; k <= graph.agent_count(); ++k) {
    const auto nb = graph.follower_neighbors(k);
    if (!nb) continue;
    const std::string who = "follower " + std::to_string(k);
    const auto a_it = desired.alpha_star.find(k);
    const auto r_it = desired.r_star.find(k);
    if (a_it == desired.alpha_star.end() || r_it == desired.r_star.end()) {
      add_violation(report, "missing-bipolar", who + " lacks alpha* or r*");
      continue;
    }
    const double alpha = a_it->second;
    if (!(alpha > 0.0 && alpha < kTwoPi)) {
      add_violation(report, "angle-domain", who + ": alpha* must lie in (0, 2pi)");
      continue;
    }
    if (alpha == kPi || std::abs(alpha - kPi) < 1e-12) {
      report.warnings.push_back(who + ": alpha* = pi places the target collinear with its neighbors");
    }
    const double d_ki = desired.distance(k, nb->i);
    const double d_kj = desired.distance(k, nb->j);
    const double d_ji = desired.distance(nb->j, nb->i);
    const double r_expected = std::log(d_ki / d_kj);
    if (std::abs(r_it->second - r_expected) > 1e-9 * std::max(1.0, std::abs(r_expected))) {
      std::ostringstream os;
      os << who << ": ratio mismatch, r*=" << r_it->second << " but ln(d*_ki/d*_kj)=" << r_expected;
      add_violation(report, "ratio-mismatch", os.str());
    }
    const double residual = law_of_cosines_residual(d_ji, d_ki, d_kj, alpha);
    if (residual > kCosineRelTol) {
      std::ostringstream os;
      os << who << ": law of cosines gives d*_" << nb->j << nb->i << "="
         << std::sqrt(d_ki * d_ki + d_kj * d_kj - 2.0 * d_ki * d_kj * std::cos(alpha))
         << " but d*=" << d_ji;
      add_violation(report, "law-of-cosines", os.str());
    }
  }
  return report;
}

std::vector<AgentId> construction_order(const FormationGraph& graph) {
  // Under the edge-direction rule ascending ids already form a valid order;
  // this performs the check explicitly.
  std::vector<AgentId> order;
  std::vector<bool> placed(static_cast<std::size_t>(graph.agent_count()) + 1, false);
  if (graph.agent_count() >= 1) placed[1] = true;
  if (graph.agent_count() >= 2) placed[2] = true;
  for (AgentId k = 3; k <= graph.agent_count(); ++k) {
    const auto nb = graph.follower_neighbors(k);
    if (!nb || !placed[nb->i] || !placed[nb->j]) {
      throw FormationError(ErrorCode::kValidation,
                           "follower " + std::to_string(k) + " precedes one of its neighbors");
    }
    placed[k] = true;
    order.push_back(k);
  }
  return order;
}

DesiredFormation desired_from_follower_specs(const FormationGraph& graph, double d21,
                                             const std::map<AgentId, FollowerSpec>& specs) {
  DesiredFormation desired;
  desired.d_star[{2, 1}] = d21;
  for (AgentId k : construction_order(graph)) {
    const auto nb = *graph.follower_neighbors(k);
    const auto it = specs.find(k);
    if (it == specs.end()) {
      throw FormationError(ErrorCode::kInvalidArgument,
                           "no specification for follower " + std::to_string(k));
    }
    desired.d_star[{k, nb.i}] = it->second.d_ki;
    desired.d_star[{k, nb.j}] = it->second.d_kj;
    desired.alpha_star[k] = it->second.alpha;
    desired.r_star[k] = std::log(it->second.d_ki / it->second.d_kj);
  }
  return desired;
}

DesiredFormation desired_from_distances(const FormationGraph& graph,
                                        const std::map<Edge, double>& d_star,
                                        const std::map<AgentId, bool>& counterclockwise) {
  DesiredFormation desired;
  desired.d_star = d_star;
  for (AgentId k : construction_order(graph)) {
    const auto nb = *graph.follower_neighbors(k);
    const double d_ki = desired.distance(k, nb.i);
    const double d_kj = desired.distance(k, nb.j);
    const double d_ji = desired.distance(nb.j, nb.i);
    const double c = (d_ki * d_ki + d_kj * d_kj - d_ji * d_ji) / (2.0 * d_ki * d_kj);
    if (c < -1.0 - 1e-12 || c > 1.0 + 1e-12) {
      throw FormationError(ErrorCode::kInconsistentTriangle,
                           "distances around follower " + std::to_string(k) +
                               " violate the triangle inequality");
    }
    const double interior = std::acos(std::clamp(c, -1.0, 1.0));
    const auto it = counterclockwise.find(k);
    const bool ccw = it == counterclockwise.end() ? true : it->second;
    desired.alpha_star[k] = ccw ? interior : kTwoPi - interior;
    desired.r_star[k] = std::log(d_ki / d_kj);
  }
  return desired;
}

Formation henneberg_extend(const Formation& base, AgentId i, AgentId j, double d_ki,
                           double d_kj, double alpha) {
  if (!(alpha > 0.0 && alpha < kTwoPi)) {
    throw FormationError(ErrorCode::kBadAngle, "edge-angle must lie in (0, 2pi)");
  }
  const int n = base.graph.agent_count();
  if (!(1 <= i && i < j && j <= n)) {
    throw FormationError(ErrorCode::kInvalidArgument, "extension requires 1 <= i < j <= n");
  }
  if (!(d_ki > 0.0) || !(d_kj > 0.0)) {
    throw FormationError(ErrorCode::kInvalidArgument, "desired distances must be positive");
  }
  if (!base.graph.has_edge(j, i)) {
    throw FormationError(ErrorCode::kInvalidArgument,
                         "extension must attach to an existing edge (j,i)");
  }
  const double d_ji = base.desired.distance(j, i);
  if (law_of_cosines_residual(d_ji, d_ki, d_kj, alpha) > kCosineRelTol) {
    throw FormationError(ErrorCode::kInconsistentTriangle,
                         "law of cosines does not reproduce d*_ji for the new triangle");
  }
  const AgentId k = n + 1;
  auto edges = base.graph.edges();
  edges.push_back({k, i});
  edges.push_back({k, j});
  Formation out{FormationGraph(k, std::move(edges)), base.desired};
  out.desired.d_star[{k, i}] = d_ki;
  out.desired.d_star[{k, j}] = d_kj;
  out.desired.alpha_star[k] = alpha;
  out.desired.r_star[k] = std::log(d_ki / d_kj);
  return out;
}

}  // namespace bform
