#pragma once

#include <optional>
#include <string>

#include "bipolar_formation/geometry.hpp"
#include "bipolar_formation/ppc.hpp"
#include "bipolar_formation/schedules.hpp"

namespace bform {

// What the secondary leader can measure, expressed in its own frame. Holds no
// positions and nothing about other agents.
struct SecondaryLeaderSnapshot {
  Vec2 z_21;              // unit bearing toward the leader
  double dist_21 = 0.0;   // measured distance to the leader
  double d_star = 0.0;    // d*_21(t)
  double d_star_rate = 0.0;
  // Orientation control: beta*(t) and the rotation of the orientation
  // reference frame relative to the agent's own frame.
  std::optional<double> beta_star;
  double reference_rotation = 0.0;
};

// What follower k can measure in its own frame: bearings to its two
// neighbors and the ratio |p_ki| / |p_kj|.
struct FollowerSnapshot {
  Vec2 z_ki;
  Vec2 z_kj;
  double ratio_kij = 1.0;
};

struct FollowerTarget {
  double r_star = 0.0;
  double alpha_star = kPi / 3.0;
};

struct ControlCommand {
  Vec2 velocity;  // in the agent's own frame
};

struct SecondaryLeaderErrors {
  double e_d = 0.0;
  std::optional<double> e_beta;
};

struct FollowerErrors {
  double e_r = 0.0;
  double e_alpha = 0.0;
};

struct SecondaryLeaderChannels {
  PpcChannel distance;
  std::optional<PpcChannel> bearing;
};

struct FollowerChannels {
  PpcChannel ratio;
  PpcChannel angle;
};

// Per-channel PPC signals at one instant.
struct ChannelState {
  double e = 0.0;
  double rho = 1.0;
  double e_tilde = 0.0;
  double sigma = 0.0;
  double xi = 0.0;
};

/// Evaluates rho, modulated error, sigma and xi. An OutOfBoundsError is
/// rethrown with `name` and `t` attached.
ChannelState evaluate_channel(const PpcChannel& ch, double e, double t, const std::string& name);

/// Bearing angle of z_21 in the orientation reference frame, in (-pi, pi].
double bearing_angle(const SecondaryLeaderSnapshot& s);

SecondaryLeaderErrors secondary_leader_errors(const SecondaryLeaderSnapshot& s);
FollowerErrors follower_errors(const FollowerSnapshot& s, const FollowerTarget& target);

ControlCommand control_leader(const VelocitySchedule& u_leader, double t);

struct SecondaryLeaderOutput {
  ControlCommand command;
  ChannelState distance;
  std::optional<ChannelState> bearing;
};

struct FollowerOutput {
  ControlCommand command;
  ChannelState ratio;
  ChannelState angle;
};

/// u_2 = xi_d sigma_d p_21 (+ xi_beta sigma_beta J z_21 with orientation
/// control). The bearing term is used only when both the snapshot carries
/// beta* and a bearing channel is configured.
SecondaryLeaderOutput evaluate_secondary(const SecondaryLeaderSnapshot& s,
                                         const SecondaryLeaderChannels& channels, double t);
ControlCommand control_secondary(const SecondaryLeaderSnapshot& s,
                                 const SecondaryLeaderChannels& channels, double t);

/// u_k = -xi_r sigma_r r_hat - xi_alpha sigma_alpha alpha_hat with the basis
/// built from z_ji recovered from the follower's own measurements. `label` is
/// the agent id used in diagnostics.
FollowerOutput evaluate_follower(const FollowerSnapshot& s, const FollowerChannels& channels,
                                 const FollowerTarget& target, double t, int label = 0);
ControlCommand control_follower(const FollowerSnapshot& s, const FollowerChannels& channels,
                                const FollowerTarget& target, double t);

/// Rotates the measured bearings into a frame turned by `theta`, evaluates the
/// law there and rotates the command back. True iff it matches the command
/// computed from `s` within 1e-12.
bool frame_invariance_check(const FollowerSnapshot& s, const FollowerChannels& channels,
                            const FollowerTarget& target, double t, double theta);
bool frame_invariance_check(const SecondaryLeaderSnapshot& s,
                            const SecondaryLeaderChannels& channels, double t, double theta);

}  // namespace bform
