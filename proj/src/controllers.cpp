#include "bipolar_formation/controllers.hpp"

#include <cmath>
#include <sstream>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/schedules.hpp"

namespace bform {

namespace {

constexpr double kInvarianceTol = 1e-12;

bool close(const Vec2& a, const Vec2& b) {
  const double scale = std::max(1.0, std::max(a.norm(), b.norm()));
  return (a - b).norm() <= kInvarianceTol * scale;
}

}  // namespace

ChannelState evaluate_channel(const PpcChannel& ch, double e, double t, const std::string& name) {
  ChannelState st;
  st.e = e;
  st.rho = rho(ch.perf, t);
  st.e_tilde = modulated_error(e, st.rho);
  try {
    st.sigma = transform(ch, st.e_tilde);
    st.xi = xi(ch, st.e_tilde, st.rho);
  } catch (const OutOfBoundsError& err) {
    std::ostringstream os;
    os << "channel " << name << " left its performance band at t=" << t << ": e=" << e
       << " not in (" << ch.lower(t) << ", " << ch.upper(t) << ")";
    throw OutOfBoundsError(name, t, err.e_tilde(), os.str());
  }
  return st;
}

double bearing_angle(const SecondaryLeaderSnapshot& s) {
  const Vec2 z_ref = rotate(-s.reference_rotation, s.z_21);
  return std::atan2(z_ref.y, z_ref.x);
}

SecondaryLeaderErrors secondary_leader_errors(const SecondaryLeaderSnapshot& s) {
  SecondaryLeaderErrors e;
  e.e_d = s.dist_21 * s.dist_21 - s.d_star * s.d_star;
  if (s.beta_star) e.e_beta = bearing_angle(s) - *s.beta_star;
  return e;
}

FollowerErrors follower_errors(const FollowerSnapshot& s, const FollowerTarget& target) {
  if (!(s.ratio_kij > 0.0)) {
    throw FormationError(ErrorCode::kInvalidArgument, "distance ratio must be positive");
  }
  FollowerErrors e;
  e.e_r = std::log(s.ratio_kij) - target.r_star;
  e.e_alpha = edge_angle(s.z_ki, s.z_kj) - target.alpha_star;
  return e;
}

ControlCommand control_leader(const VelocitySchedule& u_leader, double t) {
  return {u_leader(t)};
}

SecondaryLeaderOutput evaluate_secondary(const SecondaryLeaderSnapshot& s,
                                         const SecondaryLeaderChannels& channels, double t) {
  if (!(s.dist_21 > kEpsPos)) {
    throw FormationError(ErrorCode::kCollocated, "secondary leader is collocated with the leader");
  }
  const auto errors = secondary_leader_errors(s);
  SecondaryLeaderOutput out;
  out.distance = evaluate_channel(channels.distance, errors.e_d, t, "d");
  const Vec2 p_21 = s.z_21 * s.dist_21;
  out.command.velocity = p_21 * (out.distance.xi * out.distance.sigma);
  if (errors.e_beta && channels.bearing) {
    out.bearing = evaluate_channel(*channels.bearing, *errors.e_beta, t, "beta");
    out.command.velocity += rotate90(s.z_21) * (out.bearing->xi * out.bearing->sigma);
  }
  return out;
}

ControlCommand control_secondary(const SecondaryLeaderSnapshot& s,
                                 const SecondaryLeaderChannels& channels, double t) {
  return evaluate_secondary(s, channels, t).command;
}

FollowerOutput evaluate_follower(const FollowerSnapshot& s, const FollowerChannels& channels,
                                 const FollowerTarget& target, double t, int label) {
  if (!(s.ratio_kij > 0.0)) {
    throw FormationError(ErrorCode::kInvalidArgument, "distance ratio must be positive");
  }
  // Measured bipolar coordinates, not the desired ones.
  const double r = std::log(s.ratio_kij);
  const double alpha = edge_angle(s.z_ki, s.z_kj);
  const FollowerErrors errors{r - target.r_star, alpha - target.alpha_star};
  const std::string suffix = label > 0 ? std::to_string(label) : std::string("k");
  FollowerOutput out;
  out.ratio = evaluate_channel(channels.ratio, errors.e_r, t, "r" + suffix);
  out.angle = evaluate_channel(channels.angle, errors.e_alpha, t, "alpha" + suffix);

  const Vec2 z_ji = reconstruct_neighbor_bearing(s.z_ki, s.z_kj, s.ratio_kij);
  const BipolarBasis basis = bipolar_basis(r, alpha, z_ji);
  out.command.velocity = basis.r_hat * (-out.ratio.xi * out.ratio.sigma) +
                         basis.alpha_hat * (-out.angle.xi * out.angle.sigma);
  return out;
}

ControlCommand control_follower(const FollowerSnapshot& s, const FollowerChannels& channels,
                                const FollowerTarget& target, double t) {
  return evaluate_follower(s, channels, target, t).command;
}

bool frame_invariance_check(const FollowerSnapshot& s, const FollowerChannels& channels,
                            const FollowerTarget& target, double t, double theta) {
  const Vec2 reference = control_follower(s, channels, target, t).velocity;
  FollowerSnapshot local = s;
  local.z_ki = rotate(-theta, s.z_ki);
  local.z_kj = rotate(-theta, s.z_kj);
  const Vec2 back = rotate(theta, control_follower(local, channels, target, t).velocity);
  return close(reference, back);
}

bool frame_invariance_check(const SecondaryLeaderSnapshot& s,
                            const SecondaryLeaderChannels& channels, double t, double theta) {
  const Vec2 reference = control_secondary(s, channels, t).velocity;
  SecondaryLeaderSnapshot local = s;
  local.z_21 = rotate(-theta, s.z_21);
  // The orientation reference frame is fixed in the world, so its rotation
  // relative to the turned agent frame changes accordingly.
  local.reference_rotation = s.reference_rotation - theta;
  const Vec2 back = rotate(theta, control_secondary(local, channels, t).velocity);
  return close(reference, back);
}

}  // namespace bform
