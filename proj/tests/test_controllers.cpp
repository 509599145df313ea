#include <cmath>
#include <random>

#include "bipolar_formation/controllers.hpp"
#include "bipolar_formation/error.hpp"
#include "bipolar_formation/presets.hpp"
#include "doctest.h"

using namespace bform;

namespace {

PpcChannel unit_channel() {
  PpcChannel ch;
  ch.perf = {0.5, 0.04};
  ch.b_lower = 1.0;
  ch.b_upper = 1.0;
  return ch;
}

FollowerSnapshot snapshot_of(const Vec2& pi, const Vec2& pj, const Vec2& pk) {
  return {bearing(pk, pi), bearing(pk, pj), (pi - pk).norm() / (pj - pk).norm()};
}

FollowerChannels wide_channels(double alpha_star) {
  FollowerChannels ch;
  ch.ratio = unit_channel();
  ch.ratio.b_lower = ch.ratio.b_upper = 4.0;
  ch.angle = unit_channel();
  ch.angle.b_lower = alpha_star;
  ch.angle.b_upper = kTwoPi - alpha_star;
  return ch;
}

}  // namespace

TEST_CASE("secondary leader errors") {
  SecondaryLeaderSnapshot s;
  s.z_21 = {1, 0};
  s.dist_21 = 1.5;
  s.d_star = 1.5;
  CHECK(secondary_leader_errors(s).e_d == 0.0);
  s.dist_21 = std::sqrt(2.0);
  s.d_star = 1.0;
  CHECK(secondary_leader_errors(s).e_d == doctest::Approx(1.0));
  CHECK_FALSE(secondary_leader_errors(s).e_beta);
  s.z_21 = {0, 1};
  s.beta_star = 0.0;
  CHECK(*secondary_leader_errors(s).e_beta == doctest::Approx(kPi / 2));
  // The reference frame is turned by +pi/2 relative to the agent: a bearing of
  // pi/2 in the agent frame reads as 0.
  s.reference_rotation = kPi / 2;
  CHECK(std::abs(*secondary_leader_errors(s).e_beta) < 1e-15);
}

TEST_CASE("follower errors") {
  const double r = std::log(1.7);
  const FollowerSnapshot on{{1, 0}, {std::cos(1.1), std::sin(1.1)}, 1.7};
  const auto e0 = follower_errors(on, {r, 1.1});
  CHECK(std::abs(e0.e_r) < 1e-15);
  CHECK(std::abs(e0.e_alpha) < 1e-15);

  const auto f = sec4_formation();
  const FollowerSnapshot at_target{{1, 0}, {std::cos(kPi / 3), std::sin(kPi / 3)}, 1.0};
  const auto e3 = follower_errors(at_target, {f.desired.r_star.at(3), f.desired.alpha_star.at(3)});
  CHECK(e3.e_r == 0.0);
  CHECK(std::abs(e3.e_alpha) < 1e-15);

  const FollowerSnapshot off{{1, 0}, {0, 1}, 2.0};
  const auto e = follower_errors(off, {0.0, kPi / 3});
  CHECK(e.e_r == doctest::Approx(std::log(2.0)));
  CHECK(e.e_alpha == doctest::Approx(kPi / 6));
}

TEST_CASE("leader command") {
  const auto u = sec4_leader_velocity();
  CHECK(control_leader(u, 0.0).velocity == Vec2{1.25, kPi / 4});
  CHECK(control_leader(u, 3.0).velocity.x == 1.25);
  CHECK(std::abs(control_leader(u, 3.0).velocity.y) < 1e-15);
  CHECK(control_leader(VelocitySchedule{}, 4.0).velocity == Vec2{0, 0});
}

TEST_CASE("secondary leader command") {
  SecondaryLeaderChannels ch;
  ch.distance = unit_channel();
  ch.distance.b_lower = 0.5;
  ch.distance.b_upper = 2.0;
  SecondaryLeaderSnapshot s;
  s.z_21 = {1, 0};
  s.dist_21 = std::sqrt(2.0);
  s.d_star = 1.0;
  const Vec2 u = control_secondary(s, ch, 0.0).velocity;
  CHECK(u.x == doctest::Approx(4.2232).epsilon(1e-4));
  CHECK(u.x == doctest::Approx(5.0 / 3.0 * std::log(6.0) * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(u.y == 0.0);

  s.dist_21 = 1.0;
  CHECK(control_secondary(s, ch, 0.0).velocity == Vec2{0, 0});

  // With orientation control at zero error the command is still zero.
  ch.bearing = unit_channel();
  ch.bearing->b_lower = ch.bearing->b_upper = 3.0;
  s.beta_star = 0.0;
  const Vec2 z = control_secondary(s, ch, 0.0).velocity;
  CHECK(std::abs(z.x) < 1e-15);
  CHECK(std::abs(z.y) < 1e-15);

  // A positive bearing error moves the agent along J z_21, which turns its
  // bearing to the leader clockwise, back toward beta*.
  s.z_21 = {std::cos(0.2), std::sin(0.2)};
  const auto out = evaluate_secondary(s, ch, 0.0);
  REQUIRE(out.bearing);
  CHECK(out.bearing->e == doctest::Approx(0.2));
  CHECK(dot(out.command.velocity, rotate90(s.z_21)) > 0.0);
}

TEST_CASE("follower command worked example") {
  const Vec2 pi{-1, 0}, pj{1, 0}, pk{0, 1};
  const auto s = snapshot_of(pi, pj, pk);
  FollowerChannels ch{unit_channel(), unit_channel()};
  const FollowerTarget target{0.0, kPi / 3};
  const auto out = evaluate_follower(s, ch, target, 0.0);
  CHECK(std::abs(out.ratio.e) < 1e-15);
  CHECK(out.angle.e == doctest::Approx(kPi / 6).epsilon(1e-14));
  const double et = kPi / 6;
  const double sigma = std::log((1 + et) / (1 - et));
  const double gain = 1 / (1 + et) + 1 / (1 - et);
  // alpha_hat at (r=0, alpha=pi/2) with z_ji = (-1, 0) is (0, -1).
  CHECK(std::abs(out.command.velocity.x) < 1e-14);
  CHECK(out.command.velocity.y == doctest::Approx(gain * sigma).epsilon(1e-13));
}

TEST_CASE("zero error gives zero command") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int s = 0; s < 500; ++s) {
    const Vec2 pi{u(rng), u(rng)}, pj{u(rng), u(rng)}, pk{u(rng), u(rng)};
    if ((pi - pj).norm() < 0.3 || (pi - pk).norm() < 0.3 || (pj - pk).norm() < 0.3) continue;
    const auto snap = snapshot_of(pi, pj, pk);
    const double alpha = edge_angle(snap.z_ki, snap.z_kj);
    if (alpha < 0.05 || alpha > kTwoPi - 0.05) continue;
    const FollowerTarget target{std::log(snap.ratio_kij), alpha};
    const Vec2 v = control_follower(snap, wide_channels(alpha), target, 1.0).velocity;
    CHECK(v.norm() < 1e-12);
  }
}

TEST_CASE("ratio and angle channels act on orthogonal directions") {
  const Vec2 pi{-1.2, 0.3}, pj{0.9, -0.4}, pk{0.2, 1.6};
  const auto snap = snapshot_of(pi, pj, pk);
  const double r = std::log(snap.ratio_kij);
  const double a = edge_angle(snap.z_ki, snap.z_kj);
  const auto bp = bipolar_from_positions(pi, pj, pk);
  const auto basis = bipolar_basis(bp.r, bp.alpha, bearing(pj, pi));

  // Only the angle is off target: no motion along r_hat.
  const auto only_angle = control_follower(snap, wide_channels(a - 0.3), {r, a - 0.3}, 0.0);
  CHECK(std::abs(dot(only_angle.velocity, basis.r_hat)) < 1e-12);
  CHECK(dot(only_angle.velocity, basis.alpha_hat) < 0.0);

  // Only the ratio is off target: no motion along alpha_hat.
  const auto only_ratio = control_follower(snap, wide_channels(a), {r - 0.4, a}, 0.0);
  CHECK(std::abs(dot(only_ratio.velocity, basis.alpha_hat)) < 1e-12);
  CHECK(dot(only_ratio.velocity, basis.r_hat) < 0.0);

  // The r_hat component does not depend on the angle error and vice versa.
  const auto both = control_follower(snap, wide_channels(a - 0.3), {r - 0.4, a - 0.3}, 0.0);
  CHECK(dot(both.velocity, basis.r_hat) ==
        doctest::Approx(dot(only_ratio.velocity, basis.r_hat)).epsilon(1e-12));
  CHECK(dot(both.velocity, basis.alpha_hat) ==
        doctest::Approx(dot(only_angle.velocity, basis.alpha_hat)).epsilon(1e-12));
}

TEST_CASE("controllers are frame equivariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> th(0.0, kTwoPi);
  int checked = 0;
  while (checked < 1000) {
    const Vec2 pi{u(rng), u(rng)}, pj{u(rng), u(rng)}, pk{u(rng), u(rng)};
    if ((pi - pj).norm() < 0.3 || (pi - pk).norm() < 0.3 || (pj - pk).norm() < 0.3) continue;
    const auto snap = snapshot_of(pi, pj, pk);
    const double a = edge_angle(snap.z_ki, snap.z_kj);
    if (a < 0.05 || a > kTwoPi - 0.05) continue;
    ++checked;
    const double theta = checked == 1 ? 0.0 : (checked == 2 ? kPi / 7 : th(rng));
    const FollowerTarget target{std::log(snap.ratio_kij) + 0.3, 0.5 * (a + kPi)};
    CHECK(frame_invariance_check(snap, wide_channels(target.alpha_star), target, 0.0, theta));

    SecondaryLeaderSnapshot s;
    s.z_21 = bearing(pj, pi);
    s.dist_21 = (pi - pj).norm();
    s.d_star = 1.0;
    s.beta_star = 0.1;
    SecondaryLeaderChannels ch;
    ch.distance = unit_channel();
    ch.distance.b_lower = 0.99;
    ch.distance.b_upper = 100.0;
    ch.bearing = unit_channel();
    ch.bearing->b_lower = ch.bearing->b_upper = 3.5;
    CHECK(frame_invariance_check(s, ch, 0.0, theta));
  }
}

TEST_CASE("follower command is continuous inside the band") {
  const Vec2 pi{-1, 0}, pj{1, 0};
  const FollowerTarget target{0.1, 1.2};
  const auto ch = wide_channels(target.alpha_star);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> dir(0.0, kTwoPi);
  int checked = 0;
  while (checked < 300) {
    const Vec2 pk{u(rng), u(rng) + 2.5};
    const auto base = snapshot_of(pi, pj, pk);
    const double a = edge_angle(base.z_ki, base.z_kj);
    if (a < 0.2 || a > kTwoPi - 0.2) continue;
    ++checked;
    const Vec2 v0 = control_follower(base, ch, target, 0.0).velocity;
    const double phi = dir(rng);
    const Vec2 nudged = pk + Vec2{std::cos(phi), std::sin(phi)} * 1e-7;
    const Vec2 v1 = control_follower(snapshot_of(pi, pj, nudged), ch, target, 0.0).velocity;
    CHECK((v1 - v0).norm() < 1e-4 * (1.0 + v0.norm()));
  }
}

TEST_CASE("out of band channels report the channel") {
  FollowerChannels ch{unit_channel(), unit_channel()};
  const FollowerSnapshot s{{1, 0}, {0, 1}, 10.0};
  try {
    evaluate_follower(s, ch, {0.0, kPi / 2}, 0.0, 5);
    FAIL("expected out of bounds");
  } catch (const OutOfBoundsError& e) {
    CHECK(e.channel() == "r5");
    CHECK(e.time() == 0.0);
  }
}
