#include "bipolar_formation/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "bipolar_formation/error.hpp"

namespace bform {

namespace {

void require_unit(const Vec2& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << name << " is not a unit vector (norm " << v.norm() << ")";
    throw FormationError(ErrorCode::kNotUnit, os.str());
  }
}

// cosh r - cos alpha = 2 (sinh^2(r/2) + sin^2(alpha/2)), free of cancellation.
double bipolar_denominator(double r, double alpha) {
  const double h = std::sinh(0.5 * r);
  const double s = std::sin(0.5 * alpha);
  const double den = 2.0 * (h * h + s * s);
  if (!(den > kEpsDen)) {
    std::ostringstream os;
    os << "bipolar point (r=" << r << ", alpha=" << alpha
       << ") is at a focal singularity";
    throw FormationError(ErrorCode::kFocalSingularity, os.str());
  }
  return den;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCollocated: return "Collocated";
    case ErrorCode::kNotUnit: return "NotUnit";
    case ErrorCode::kFocalSingularity: return "FocalSingularity";
    case ErrorCode::kDegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::kInconsistentTriangle: return "InconsistentTriangle";
    case ErrorCode::kBadAngle: return "BadAngle";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInfeasibleInitialError: return "InfeasibleInitialError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Vec2 rotate(double theta, const Vec2& v) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 bearing(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  const double n = d.norm();
  if (!(n > kEpsPos)) {
    throw FormationError(ErrorCode::kCollocated, "bearing between collocated points");
  }
  return d / n;
}

double edge_angle(const Vec2& z_ki, const Vec2& z_kj) {
  require_unit(z_ki, "z_ki");
  require_unit(z_kj, "z_kj");
  const double a = std::acos(std::clamp(dot(z_ki, z_kj), -1.0, 1.0));
  if (dot(rotate90(z_ki), z_kj) >= 0.0) return a;
  // 2*pi - acos(1) would land on 2*pi, outside [0, 2*pi).
  return a == 0.0 ? 0.0 : kTwoPi - a;
}

double log_ratio(double dist_ki, double dist_kj) {
  if (!(dist_ki > kEpsPos) || !(dist_kj > kEpsPos)) {
    throw FormationError(ErrorCode::kCollocated, "log_ratio of a collocated pair");
  }
  return std::log(dist_ki / dist_kj);
}

Vec2 bipolar_to_cartesian(const BipolarPoint& bp) {
  const double den = bipolar_denominator(bp.r, bp.alpha);
  return {bp.c * std::sinh(bp.r) / den, bp.c * std::sin(bp.alpha) / den};
}

double bipolar_scale_factor(const BipolarPoint& bp) {
  return bp.c / bipolar_denominator(bp.r, bp.alpha);
}

BipolarBasis bipolar_basis(double r, double alpha, const Vec2& z_ji) {
  require_unit(z_ji, "z_ji");
  const double den = bipolar_denominator(r, alpha);
  BipolarBasis b;
  b.f1 = -std::sinh(r) * std::sin(alpha) / den;
  // cos(alpha) cosh(r) - 1 in half-angle form.
  const double h2 = std::sinh(0.5 * r) * std::sinh(0.5 * r);
  const double s2 = std::sin(0.5 * alpha) * std::sin(0.5 * alpha);
  b.f2 = 2.0 * (h2 - s2 - 2.0 * s2 * h2) / den;
  const Vec2 z_perp = rotate90_cw(z_ji);
  b.alpha_hat = -b.f1 * z_ji + b.f2 * z_perp;
  b.r_hat = b.f2 * z_ji + b.f1 * z_perp;
  return b;
}

Vec2 reconstruct_neighbor_bearing(const Vec2& z_ki, const Vec2& z_kj,
                                  double ratio_kij) {
  const Vec2 z_k = ratio_kij * z_ki - z_kj;
  const double n = z_k.norm();
  if (!(n > kEpsPos)) {
    throw FormationError(ErrorCode::kDegenerateTriangle,
                         "neighbors coincide as seen from the follower");
  }
  return z_k / n;
}

FocalFrame make_focal_frame(const Vec2& p_i, const Vec2& p_j) {
  FocalFrame f;
  f.origin = (p_i + p_j) * 0.5;
  // x axis = -z_ji, y axis = J^T z_ji
  const Vec2 z_ji = bearing(p_j, p_i);
  f.x_axis = -z_ji;
  f.y_axis = rotate90_cw(z_ji);
  f.c = 0.5 * (p_i - p_j).norm();
  return f;
}

BipolarPoint bipolar_from_positions(const Vec2& p_i, const Vec2& p_j,
                                    const Vec2& p_k) {
  const Vec2 p_ki = p_i - p_k;
  const Vec2 p_kj = p_j - p_k;
  BipolarPoint bp;
  bp.r = log_ratio(p_ki.norm(), p_kj.norm());
  bp.alpha = edge_angle(bearing(p_k, p_i), bearing(p_k, p_j));
  bp.c = 0.5 * (p_i - p_j).norm();
  return bp;
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace bform
