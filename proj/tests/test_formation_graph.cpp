#include <algorithm>
#include <cmath>
#include <random>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/formation_graph.hpp"
#include "bipolar_formation/geometry.hpp"
#include "bipolar_formation/presets.hpp"
#include "doctest.h"

using namespace bform;

namespace {

bool has_rule(const ValidationReport& r, const std::string& rule) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

Formation leader_pair(double d21) {
  Formation f;
  f.graph = FormationGraph::leader_pair();
  f.desired.d_star[{2, 1}] = d21;
  return f;
}

}  // namespace

TEST_CASE("validate_graph accepts the six-agent maneuver graph") {
  const auto f = sec4_formation();
  const auto r = validate_graph(f.graph);
  CHECK_MESSAGE(r.ok(), r.to_string());
  CHECK(f.graph.edges().size() == 9);
}

TEST_CASE("literal edge list with (6,5) fails triangulation") {
  const FormationGraph g(6, {{2, 1}, {3, 1}, {3, 2}, {4, 2}, {4, 3}, {5, 2}, {5, 4}, {6, 3}, {6, 5}});
  const auto r = validate_graph(g);
  CHECK_FALSE(r.ok());
  CHECK(has_rule(r, "triangulation"));
}

TEST_CASE("validate_graph small cases") {
  CHECK(validate_graph(FormationGraph::leader_pair()).ok());
  const auto r = validate_graph(FormationGraph(3, {{2, 1}, {3, 1}}));
  CHECK(has_rule(r, "out-degree"));
  CHECK(r.to_string().find("out(3)=1") != std::string::npos);
  CHECK(has_rule(validate_graph(FormationGraph(3, {{2, 1}, {3, 1}, {1, 3}})), "edge-direction"));
  CHECK(has_rule(validate_graph(FormationGraph(3, {{2, 1}, {3, 1}, {3, 3}})), "self-loop"));
  CHECK(has_rule(validate_graph(FormationGraph(3, {{2, 1}, {3, 1}, {3, 4}})), "vertex-range"));
  CHECK(has_rule(validate_graph(FormationGraph(1, {})), "agent-count"));
}

TEST_CASE("follower neighbors are sorted") {
  const auto g = sec4_formation().graph;
  const auto nb = g.follower_neighbors(6);
  REQUIRE(nb);
  CHECK(nb->i == 3);
  CHECK(nb->j == 4);
  CHECK_FALSE(g.follower_neighbors(2));
}

TEST_CASE("validate_desired on the six-agent shape") {
  const auto f = sec4_formation();
  const auto r = validate_desired(f.graph, f.desired);
  CHECK_MESSAGE(r.ok(), r.to_string());
  for (const auto& [k, r_star] : f.desired.r_star) CHECK(r_star == 0.0);
  CHECK(f.desired.alpha_star.at(3) == doctest::Approx(kPi / 3));
  CHECK(f.desired.alpha_star.at(4) == doctest::Approx(5 * kPi / 3));
}

TEST_CASE("validate_desired flags inconsistent triangles and ratios") {
  FormationGraph g(3, {{2, 1}, {3, 1}, {3, 2}});
  DesiredFormation d;
  d.d_star[{2, 1}] = 2.0;
  d.d_star[{3, 1}] = 1.0;
  d.d_star[{3, 2}] = 1.0;
  d.alpha_star[3] = kPi / 3;
  d.r_star[3] = 0.0;
  CHECK(has_rule(validate_desired(g, d), "law-of-cosines"));

  d.d_star[{2, 1}] = 1.0;
  CHECK(validate_desired(g, d).ok());
  d.r_star[3] = 0.1;
  CHECK(has_rule(validate_desired(g, d), "ratio-mismatch"));

  d.r_star[3] = 0.0;
  d.alpha_star[3] = 0.0;
  CHECK(has_rule(validate_desired(g, d), "angle-domain"));

  d.alpha_star[3] = kPi / 3;
  d.d_star[{3, 1}] = -1.0;
  CHECK(has_rule(validate_desired(g, d), "distance-positive"));
}

TEST_CASE("collinear target is accepted with a warning") {
  FormationGraph g(3, {{2, 1}, {3, 1}, {3, 2}});
  const auto d = desired_from_follower_specs(g, 2.0, {{3, {1.0, 1.0, kPi}}});
  const auto r = validate_desired(g, d);
  CHECK(r.ok());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("henneberg extension") {
  auto f = henneberg_extend(leader_pair(1.875), 1, 2, 1.875, 1.875, kPi / 3);
  f = henneberg_extend(f, 2, 3, 1.875, 1.875, 5 * kPi / 3);
  const auto target = sec4_formation();
  CHECK(f.graph.has_edge(4, 2));
  CHECK(f.graph.has_edge(4, 3));
  CHECK(f.desired.alpha_star.at(4) == doctest::Approx(target.desired.alpha_star.at(4)));
  CHECK(f.desired.r_star.at(4) == 0.0);
  CHECK(validate_graph(f.graph).ok());
  CHECK(validate_desired(f.graph, f.desired).ok());

  CHECK_THROWS_AS(henneberg_extend(f, 1, 2, 1, 1, 0.0), FormationError);
  try {
    henneberg_extend(f, 1, 2, 1, 1, 0.0);
  } catch (const FormationError& e) {
    CHECK(e.code() == ErrorCode::kBadAngle);
  }
  try {
    henneberg_extend(f, 1, 2, 1.0, 1.0, kPi / 2);
    FAIL("expected an inconsistent triangle");
  } catch (const FormationError& e) {
    CHECK(e.code() == ErrorCode::kInconsistentTriangle);
  }
}

TEST_CASE("henneberg extension keeps the graph valid") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto f = random_henneberg_formation(12, seed);
    const auto g = validate_graph(f.graph);
    CHECK_MESSAGE(g.ok(), g.to_string());
    CHECK(f.graph.edges().size() == 2 * 12 - 3);
    const auto d = validate_desired(f.graph, f.desired);
    CHECK_MESSAGE(d.ok(), d.to_string());
    const auto order = construction_order(f.graph);
    CHECK(std::is_sorted(order.begin(), order.end()));
    std::vector<bool> placed(13, false);
    placed[1] = placed[2] = true;
    for (AgentId k : order) {
      const auto nb = f.graph.follower_neighbors(k);
      REQUIRE(nb);
      CHECK(placed[nb->i]);
      CHECK(placed[nb->j]);
      placed[k] = true;
    }
  }
}

TEST_CASE("desired shape from distances picks the requested orientation") {
  const auto f = sec4_formation();
  const auto d = desired_from_distances(f.graph, f.desired.d_star,
                                        {{3, true}, {4, false}, {5, false}, {6, true}});
  for (const auto& [k, a] : f.desired.alpha_star) {
    CHECK(d.alpha_star.at(k) == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(law_of_cosines_residual(1.0, 1.0, 1.0, kPi / 3) < 1e-15);
}
