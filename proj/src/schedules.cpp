#include "bipolar_formation/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "bipolar_formation/error.hpp"

namespace bform {

double SinusoidTerm::value(double t) const {
  const double arg = frequency * t + phase;
  return amplitude * (cosine ? std::cos(arg) : std::sin(arg));
}

double SinusoidTerm::rate(double t) const {
  const double arg = frequency * t + phase;
  return amplitude * frequency * (cosine ? -std::sin(arg) : std::cos(arg));
}

double ScalarSeries::value(double t) const {
  double v = offset;
  for (const auto& term : terms) v += term.value(t);
  return v;
}

double ScalarSeries::rate(double t) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.rate(t);
  return v;
}

bool VectorSeries::is_zero() const {
  const auto zero = [](const ScalarSeries& s) {
    return s.offset == 0.0 &&
           std::all_of(s.terms.begin(), s.terms.end(),
                       [](const SinusoidTerm& term) { return term.amplitude == 0.0; });
  };
  return zero(x) && zero(y);
}

Vec2 disturbance(const DisturbanceSchedule& sched, double t) { return sched(t); }

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double smoothstep_rate(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (s - 1.0) * (s - 1.0);
}

ReferenceSchedule ReferenceSchedule::constant(double value) { return piecewise(value, {}); }

ReferenceSchedule ReferenceSchedule::piecewise(double initial,
                                               std::vector<SmoothSegment> segments) {
  std::sort(segments.begin(), segments.end(),
            [](const SmoothSegment& a, const SmoothSegment& b) { return a.t0 < b.t0; });
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!(segments[s].t1 > segments[s].t0)) {
      throw FormationError(ErrorCode::kInvalidArgument, "reference segment needs t1 > t0");
    }
    if (s > 0 && segments[s].t0 < segments[s - 1].t1) {
      throw FormationError(ErrorCode::kInvalidArgument, "reference segments overlap");
    }
  }
  ReferenceSchedule r;
  r.kind_ = Kind::kPiecewise;
  r.initial_ = initial;
  r.segments_ = std::move(segments);
  return r;
}

ReferenceSchedule ReferenceSchedule::heading_tracking(double hold_value, double hold_until,
                                                      double blend, double offset,
                                                      VelocitySchedule leader,
                                                      double frame_rotation) {
  if (!(blend > 0.0)) {
    throw FormationError(ErrorCode::kInvalidArgument, "heading blend duration must be positive");
  }
  ReferenceSchedule r;
  r.kind_ = Kind::kHeadingTracking;
  r.initial_ = hold_value;
  r.hold_until_ = hold_until;
  r.blend_ = blend;
  r.offset_ = offset;
  r.leader_ = std::move(leader);
  r.frame_rotation_ = frame_rotation;
  return r;
}

double ReferenceSchedule::value(double t) const {
  if (kind_ == Kind::kPiecewise) {
    double v = initial_;
    for (const auto& seg : segments_) {
      if (t <= seg.t0) break;
      const double s = (t - seg.t0) / (seg.t1 - seg.t0);
      v = v + (seg.to - v) * smoothstep(s);
    }
    return v;
  }
  if (t <= hold_until_) return initial_;
  const Vec2 u = leader_(t);
  const double target = std::atan2(u.y, u.x) - frame_rotation_ + offset_;
  const double w = smoothstep((t - hold_until_) / blend_);
  return initial_ + (target - initial_) * w;
}

double ReferenceSchedule::rate(double t) const {
  if (kind_ == Kind::kPiecewise) {
    double v = initial_;
    double dv = 0.0;
    for (const auto& seg : segments_) {
      if (t <= seg.t0) break;
      const double span = seg.t1 - seg.t0;
      const double s = (t - seg.t0) / span;
      dv = (seg.to - v) * smoothstep_rate(s) / span;
      v = v + (seg.to - v) * smoothstep(s);
    }
    return dv;
  }
  if (t <= hold_until_) return 0.0;
  // Numerical derivative; the blended heading has no compact closed form.
  const double h = 1e-6;
  return (value(t + h) - value(t - h)) / (2.0 * h);
}

}  // namespace bform
