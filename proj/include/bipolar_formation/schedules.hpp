#pragma once

#include <vector>

#include "bipolar_formation/geometry.hpp"

namespace bform {

// amplitude * sin(frequency * t + phase), or cos when `cosine` is set.
struct SinusoidTerm {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
  double phase = 0.0;      // rad
  bool cosine = false;

  double value(double t) const;
  double rate(double t) const;
};

struct ScalarSeries {
  double offset = 0.0;
  std::vector<SinusoidTerm> terms;

  double value(double t) const;
  double rate(double t) const;
};

// Per-axis sinusoid sums. Used for disturbances and the leader velocity.
struct VectorSeries {
  ScalarSeries x;
  ScalarSeries y;

  Vec2 operator()(double t) const { return {x.value(t), y.value(t)}; }
  bool is_zero() const;
};

using DisturbanceSchedule = VectorSeries;
using VelocitySchedule = VectorSeries;

Vec2 disturbance(const DisturbanceSchedule& sched, double t);

/// 6s^5 - 15s^4 + 10s^3 clamped to [0, 1].
double smoothstep(double s);
double smoothstep_rate(double s);

// Quintic ramp from the value in force at t0 to `to`, reached at t1.
struct SmoothSegment {
  double t0 = 0.0;
  double t1 = 1.0;
  double to = 0.0;
};

// A continuously differentiable scalar reference: either a held value with
// smooth ramps, or a bearing that, after `hold_until`, blends into the
// leader's heading plus an offset.
class ReferenceSchedule {
 public:
  enum class Kind { kPiecewise, kHeadingTracking };

  ReferenceSchedule() = default;
  static ReferenceSchedule constant(double value);
  static ReferenceSchedule piecewise(double initial, std::vector<SmoothSegment> segments);
  static ReferenceSchedule heading_tracking(double hold_value, double hold_until, double blend,
                                            double offset, VelocitySchedule leader,
                                            double frame_rotation = 0.0);

  double value(double t) const;
  double rate(double t) const;

  Kind kind() const { return kind_; }
  double initial() const { return initial_; }
  const std::vector<SmoothSegment>& segments() const { return segments_; }
  double hold_until() const { return hold_until_; }
  double blend() const { return blend_; }
  double offset() const { return offset_; }
  double frame_rotation() const { return frame_rotation_; }
  const VelocitySchedule& leader() const { return leader_; }

 private:
  Kind kind_ = Kind::kPiecewise;
  double initial_ = 0.0;
  std::vector<SmoothSegment> segments_;
  double hold_until_ = 0.0;
  double blend_ = 1.0;
  double offset_ = 0.0;
  double frame_rotation_ = 0.0;
  VelocitySchedule leader_;
};

}  // namespace bform
