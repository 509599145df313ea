#include <algorithm>
#include <cmath>
#include <random>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/oracles.hpp"
#include "bipolar_formation/presets.hpp"
#include "doctest.h"

using namespace bform;

namespace {

double max_edge_error(const std::vector<Vec2>& p, const Formation& f) {
  double worst = 0.0;
  for (const auto& e : f.graph.edges()) {
    const double d = (p[e.from - 1] - p[e.to - 1]).norm();
    worst = std::max(worst, std::abs(d - f.desired.distance(e.from, e.to)));
  }
  return worst;
}

Vec2 reflect(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 u = (b - a) / (b - a).norm();
  const Vec2 d = p - a;
  return a + u * (2.0 * dot(d, u)) - d;
}

// A random valid construction order: any follower whose neighbors are placed
// may come next.
std::vector<AgentId> shuffled_order(const FormationGraph& g, std::mt19937_64& rng) {
  std::vector<AgentId> order;
  std::vector<bool> placed(static_cast<std::size_t>(g.agent_count()) + 1, false);
  placed[1] = placed[2] = true;
  while (static_cast<int>(order.size()) < g.agent_count() - 2) {
    std::vector<AgentId> ready;
    for (AgentId k = 3; k <= g.agent_count(); ++k) {
      const auto nb = g.follower_neighbors(k);
      if (!placed[k] && placed[nb->i] && placed[nb->j]) ready.push_back(k);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    const AgentId k = ready[pick(rng)];
    placed[k] = true;
    order.push_back(k);
  }
  return order;
}

}  // namespace

TEST_CASE("target reconstruction") {
  const auto f = sec4_formation();
  const auto p = reconstruct_target_positions(f.graph, f.desired, {0, 0}, 0.0);
  REQUIRE(p.size() == 6);
  CHECK(max_edge_error(p, f) < 1e-9);
  CHECK(p[0] == Vec2{0, 0});
  CHECK(p[1].x == doctest::Approx(-1.875));
  CHECK(p[2].x == doctest::Approx(-0.9375));
  CHECK(p[2].y == doctest::Approx(-1.875 * std::sqrt(3.0) / 2));
  CHECK(p[5].y == doctest::Approx(-1.875 * std::sqrt(3.0)));

  Formation pair;
  pair.graph = FormationGraph::leader_pair();
  pair.desired.d_star[{2, 1}] = 2.5;
  const auto q = reconstruct_target_positions(pair.graph, pair.desired, {1, 1}, kPi / 2);
  REQUIRE(q.size() == 2);
  CHECK((q[1] - q[0]).norm() == doctest::Approx(2.5));
  const Vec2 z = bearing(q[1], q[0]);
  CHECK(z.y == doctest::Approx(1.0));

  // Mirrored follower: the reflected angle lands across its neighbors' line.
  auto mirrored = f;
  mirrored.desired.alpha_star[6] = kTwoPi - f.desired.alpha_star.at(6);
  const auto m = reconstruct_target_positions(mirrored.graph, mirrored.desired, {0, 0}, 0.0);
  CHECK(max_edge_error(m, f) < 1e-9);
  const Vec2 want = reflect(p[5], p[2], p[3]);
  CHECK((m[5] - want).norm() < 1e-9);
  for (int a = 0; a < 5; ++a) CHECK((m[a] - p[a]).norm() < 1e-12);
}

TEST_CASE("target reconstruction does not depend on the construction order") {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = random_henneberg_formation(14, seed);
    const auto base = reconstruct_target_positions(f.graph, f.desired, {0.5, -1}, 0.7);
    CHECK(max_edge_error(base, f) < 1e-9);
    for (int s = 0; s < 5; ++s) {
      const auto order = shuffled_order(f.graph, rng);
      const auto alt = reconstruct_target_positions(f.graph, f.desired, {0.5, -1}, 0.7, order);
      double worst = 0.0;
      for (std::size_t a = 0; a < base.size(); ++a) worst = std::max(worst, (alt[a] - base[a]).norm());
      CHECK(worst < 1e-12);
    }
  }
  const auto f = sec4_formation();
  CHECK_THROWS_AS(reconstruct_target_positions(f.graph, f.desired, {0, 0}, 0.0,
                                               std::vector<AgentId>{4, 3, 5, 6}),
                  FormationError);
}

TEST_CASE("basis finite differences") {
  CHECK(check_basis_by_finite_difference(0.0, kPi / 2, 1.0, {1, 0}) < 1e-5);
  CHECK(check_basis_by_finite_difference(std::log(2.0), kPi / 2, 2.0, {0.6, 0.8}) < 1e-5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rr(-2.5, 2.5);
  std::uniform_real_distribution<double> aa(0.05, kTwoPi - 0.05);
  std::uniform_real_distribution<double> th(0.0, kTwoPi);
  for (int s = 0; s < 1000; ++s) {
    const double t = th(rng);
    CHECK(check_basis_by_finite_difference(rr(rng), aa(rng), 1.3, {std::cos(t), std::sin(t)}) < 1e-5);
  }
}

TEST_CASE("corrupted basis is caught") {
  const BasisFn corrupted = [](double r, double alpha, const Vec2& z) {
    auto b = bipolar_basis(r, alpha, z);
    b.f1 = -b.f1;
    const Vec2 zp = rotate90_cw(z);
    b.alpha_hat = -b.f1 * z + b.f2 * zp;
    b.r_hat = b.f2 * z + b.f1 * zp;
    return b;
  };
  CHECK(check_basis_by_finite_difference(0.7, 1.1, 1.0, {1, 0}, corrupted) > 0.1);
  // At r = 0, alpha = pi/2 f1 vanishes, so the corruption is invisible there.
  CHECK(check_basis_by_finite_difference(0.0, kPi / 2, 1.0, {1, 0}, corrupted) < 1e-5);
}

TEST_CASE("edge-angle and ratio rates") {
  const Vec2 pi{-1, 0.2}, pj{1.3, -0.1}, pk{0.1, 1.7};
  const auto still = check_angle_rate(pi, pj, pk, {0, 0}, {0, 0}, {0, 0});
  CHECK(still.analytic_alpha_rate == 0.0);
  CHECK(std::abs(still.numeric_alpha_rate) < 1e-9);
  CHECK(still.analytic_r_rate == 0.0);
  const Vec2 v{0.4, -2.0};
  const auto rigid = check_angle_rate(pi, pj, pk, v, v, v);
  CHECK(std::abs(rigid.analytic_alpha_rate) < 1e-15);
  CHECK(std::abs(rigid.analytic_r_rate) < 1e-15);
  CHECK(rigid.max_deviation() < 1e-8);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    if ((a - b).norm() < 0.3 || (a - c).norm() < 0.3 || (b - c).norm() < 0.3) continue;
    const double alpha = edge_angle(bearing(c, a), bearing(c, b));
    if (alpha < 0.05 || alpha > kTwoPi - 0.05) continue;
    ++checked;
    const auto res = check_angle_rate(a, b, c, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
    CHECK(res.max_deviation() < 1e-5);
  }
}

TEST_CASE("m_k positivity") {
  const auto r = sample_mk_positivity(10000, 3, 0.05);
  CHECK(r.samples == 10000);
  CHECK(r.worst.m_k > 0.0);
  CHECK(r.max_norm_residual < 1e-10);
  CHECK(r.max_quadratic_residual < 1e-10);
  CHECK(r.worst.alpha > 0.05);
  CHECK(r.worst.alpha < kTwoPi - 0.05);

  // Symmetric configuration on the perpendicular bisector.
  const Vec2 pi{-1, 0}, pj{1, 0}, pk{0, 2};
  const Vec2 eta = bearing(pk, pj) / (pj - pk).norm() - bearing(pk, pi) / (pi - pk).norm();
  CHECK(eta.norm() > 0.0);

  // Without a margin and with far neighbors m_k approaches zero.
  const auto loose = sample_mk_positivity(10000, 3, 1e-4, 0.1, 1000.0);
  CHECK(loose.worst.m_k < r.worst.m_k);
  CHECK(loose.worst.m_k < 1e-3);
}

TEST_CASE("strong congruency") {
  const auto f = sec4_formation();
  const auto p = reconstruct_target_positions(f.graph, f.desired, {0, 0}, 0.0);
  CHECK(strong_congruency_check(p, f.desired, f.graph, 1e-8));

  std::vector<Vec2> mirror;
  for (const auto& q : p) mirror.push_back(reflect(q, p[0], p[1]));
  CHECK_FALSE(strong_congruency_check(mirror, f.desired, f.graph, 0.05));

  std::vector<Vec2> moved;
  for (const auto& q : p) moved.push_back(rotate(1.234, q) + Vec2{3.5, -7.25});
  CHECK(strong_congruency_check(moved, f.desired, f.graph, 1e-8));

  auto scaled = p;
  for (auto& q : scaled) q = q * 1.1;
  CHECK_FALSE(strong_congruency_check(scaled, f.desired, f.graph, 0.05));
}

TEST_CASE("distance and bipolar conditions are equivalent near the target") {
  const auto f = sec4_formation();
  const auto res = check_shape_equivalence(f.graph, f.desired, 1000, 5);
  CHECK(res.samples == 1000);
  CHECK(res.failures == 0);
  CHECK(res.exact_residual < 1e-9);
  const auto g = random_henneberg_formation(10, 4);
  CHECK(check_shape_equivalence(g.graph, g.desired, 1000, 6).failures == 0);
}

TEST_CASE("ppc and frame oracles") {
  CHECK(check_ppc_derivatives(2000, 2) < 1e-6);
  CHECK(check_frame_invariance(1000, 2) < 1e-12);
}

TEST_CASE("verify suite") {
  const auto rows = run_verify_suite(1, 30);
  CHECK(rows.size() == 7);
  for (const auto& r : rows) {
    CHECK_MESSAGE(r.pass, r.name << ": " << r.detail);
    CHECK(r.count > 0);
  }
}
