#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bform {

// Vertices are 1-indexed: agent 1 is the leader, agent 2 the secondary leader
// and agents k >= 3 are followers.
using AgentId = int;

// Directed sensing edge (from, to): agent `from` measures the bearing of `to`.
struct Edge {
  AgentId from = 0;
  AgentId to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct FollowerNeighbors {
  AgentId i = 0;  // smaller-index neighbor
  AgentId j = 0;
};

class FormationGraph {
 public:
  FormationGraph() = default;
  FormationGraph(int n, std::vector<Edge> edges);

  /// Leader pair 1 <- 2 only.
  static FormationGraph leader_pair();

  int agent_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(AgentId from, AgentId to) const;
  std::vector<AgentId> out_neighbors(AgentId a) const;

  /// Sorted neighbors (i < j) of follower k. Empty when k does not have
  /// exactly two out-neighbors.
  std::optional<FollowerNeighbors> follower_neighbors(AgentId k) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_graph(const FormationGraph& graph);

// Desired shape. Distances are keyed by edge; angles and log-ratios by
// follower id.
struct DesiredFormation {
  std::map<Edge, double> d_star;
  std::map<AgentId, double> alpha_star;
  std::map<AgentId, double> r_star;

  double distance(AgentId from, AgentId to) const;
};

/// Checks positivity of d*, the alpha* domain, r*_k = ln(d*_ki / d*_kj) and
/// each triangle's law of cosines at relative tolerance 1e-9. alpha* = pi is
/// reported as a warning. Requires a valid graph.
ValidationReport validate_desired(const FormationGraph& graph,
                                  const DesiredFormation& desired);

struct FollowerSpec {
  double d_ki = 0.0;
  double d_kj = 0.0;
  double alpha = 0.0;
};

/// Desired formation from d*_21 and per-follower (d_ki, d_kj, alpha); r* is
/// derived and every d*_ji is filled from the follower that created it.
DesiredFormation desired_from_follower_specs(
    const FormationGraph& graph, double d21,
    const std::map<AgentId, FollowerSpec>& specs);

/// Desired formation from a full distance set. The law of cosines fixes each
/// edge-angle up to reflection; `counterclockwise[k]` picks alpha < pi.
DesiredFormation desired_from_distances(
    const FormationGraph& graph, const std::map<Edge, double>& d_star,
    const std::map<AgentId, bool>& counterclockwise);

struct Formation {
  FormationGraph graph;
  DesiredFormation desired;
};

/// Attaches vertex n+1 to the existing edge (j, i). Throws kBadAngle if alpha
/// is outside (0, 2*pi) and kInconsistentTriangle if the law of cosines does
/// not reproduce the existing d*_ji.
Formation henneberg_extend(const Formation& base, AgentId i, AgentId j,
                           double d_ki, double d_kj, double alpha);

/// Follower ids in an order where both neighbors of each precede it.
std::vector<AgentId> construction_order(const FormationGraph& graph);

/// Relative law-of-cosines residual |c^2 - (a^2 + b^2 - 2ab cos(alpha))| / c^2.
double law_of_cosines_residual(double d_ji, double d_ki, double d_kj, double alpha);

}  // namespace bform
