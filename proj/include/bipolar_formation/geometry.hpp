#pragma once

#include <cmath>

namespace bform {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Collocation guard for positions and distances (length units).
inline constexpr double kEpsPos = 1e-9;
// Guard on the bipolar denominator cosh(r) - cos(alpha).
inline constexpr double kEpsDen = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3-D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Counterclockwise quarter turn J.
constexpr Vec2 rotate90(const Vec2& v) { return {-v.y, v.x}; }
// Clockwise quarter turn, J^T.
constexpr Vec2 rotate90_cw(const Vec2& v) { return {v.y, -v.x}; }
Vec2 rotate(double theta, const Vec2& v);

/// Unit vector pointing from `from` toward `to`. Throws kCollocated when the
/// points are within kEpsPos of each other.
Vec2 bearing(const Vec2& from, const Vec2& to);

/// Counterclockwise angle from bearing z_ki to bearing z_kj, in [0, 2*pi).
/// Both inputs must be unit vectors within 1e-9 (kNotUnit otherwise).
/// Antipodal bearings resolve to exactly pi on either branch.
double edge_angle(const Vec2& z_ki, const Vec2& z_kj);

/// ln(dist_ki / dist_kj); throws kCollocated if either distance is <= kEpsPos.
double log_ratio(double dist_ki, double dist_kj);

// Point in the bipolar system whose foci are agent i at (-c, 0) and agent j
// at (+c, 0) of the virtual frame {C_k}.
struct BipolarPoint {
  double r = 0.0;
  double alpha = 0.0;
  double c = 1.0;
};

/// Cartesian position in {C_k}. Throws kFocalSingularity when
/// cosh(r) - cos(alpha) <= kEpsDen.
Vec2 bipolar_to_cartesian(const BipolarPoint& bp);

/// Metric factor q = c / (cosh r - cos alpha), shared by both coordinates.
double bipolar_scale_factor(const BipolarPoint& bp);

struct BipolarBasis {
  Vec2 r_hat;
  Vec2 alpha_hat;
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Bipolar basis expressed in whatever frame z_ji is expressed in.
BipolarBasis bipolar_basis(double r, double alpha, const Vec2& z_ji);

/// Recovers z_ji from what agent k sees: its bearings to i and j and the
/// distance ratio |p_ki| / |p_kj|. Throws kDegenerateTriangle when i and j
/// overlap as seen from k.
Vec2 reconstruct_neighbor_bearing(const Vec2& z_ki, const Vec2& z_kj,
                                  double ratio_kij);

// Virtual frame {C_k}: origin at the midpoint of i-j, x axis from i toward j.
struct FocalFrame {
  Vec2 origin;
  Vec2 x_axis;
  Vec2 y_axis;
  double c = 0.0;

  Vec2 to_world(const Vec2& local) const {
    return origin + x_axis * local.x + y_axis * local.y;
  }
  Vec2 to_local(const Vec2& world) const {
    const Vec2 d = world - origin;
    return {dot(d, x_axis), dot(d, y_axis)};
  }
};

FocalFrame make_focal_frame(const Vec2& p_i, const Vec2& p_j);

// Bipolar coordinates of p_k with foci p_i, p_j.
BipolarPoint bipolar_from_positions(const Vec2& p_i, const Vec2& p_j,
                                    const Vec2& p_k);

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);

}  // namespace bform
