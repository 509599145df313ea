#pragma once

#include <functional>

namespace bform {

// rho(t) = (1 - rho_inf) exp(-l t) + rho_inf
struct PerformanceFunction {
  double l = 0.5;
  double rho_inf = 0.04;
};

double rho(const PerformanceFunction& perf, double t);
double rho_dot(const PerformanceFunction& perf, double t);

// Envelope -b_lower * rho(t) < e(t) < b_upper * rho(t).
struct PpcChannel {
  PerformanceFunction perf;
  double b_lower = 1.0;
  double b_upper = 1.0;

  double lower(double t) const { return -b_lower * rho(perf, t); }
  double upper(double t) const { return b_upper * rho(perf, t); }
  bool contains(double e, double t) const { return lower(t) < e && e < upper(t); }
};

double modulated_error(double e, double rho_t);

/// sigma = ln((b_up*e + b_up*b_lo) / (b_up*b_lo - b_lo*e)). Throws
/// OutOfBoundsError unless -b_lower < e_tilde < b_upper.
double transform(const PpcChannel& ch, double e_tilde);

/// Inverse of `transform`, defined on all reals.
double inverse_transform(const PpcChannel& ch, double sigma);

/// xi = (1/rho) (1/(e_tilde + b_lo) - 1/(e_tilde - b_up)); strictly positive
/// inside the band.
double xi(const PpcChannel& ch, double e_tilde, double rho_t);

// Scalar reference signal used by bound selection. Evaluated on a grid.
using ReferenceFn = std::function<double(double)>;

// Horizon and grid over which inf-conditions on time-varying references are
// evaluated.
struct BoundGrid {
  double horizon = 40.0;
  double dt = 0.01;
};

inline constexpr double kBoundMargin = 0.99;

/// Distance channel: b_lower = 0.99 * inf_t d*(t)^2 / rho(t); b_upper
/// defaults to max(b_lower, 2 e0 / rho(0)). Throws
/// kInfeasibleInitialError if e0 cannot be strictly contained.
PpcChannel select_bounds_distance(const ReferenceFn& d_star, const PerformanceFunction& perf,
                                  double e0, const BoundGrid& grid = {});

/// Edge-angle channel: b_lower = alpha*, b_upper = 2 pi - alpha*.
PpcChannel select_bounds_angle(double alpha_star, const PerformanceFunction& perf, double e0);

/// Ratio channel: b_lower = b_upper = max(1, 2 |e0|).
PpcChannel select_bounds_ratio(const PerformanceFunction& perf, double e0);

/// Bearing channel: keeps beta inside (-pi, pi) with the 0.99 margin.
PpcChannel select_bounds_bearing(const ReferenceFn& beta_star, const PerformanceFunction& perf,
                                 double e0, const BoundGrid& grid = {});

/// Throws kInfeasibleInitialError unless -b_lower*rho(0) < e0 < b_upper*rho(0).
void require_initial_containment(const PpcChannel& ch, double e0, const char* channel_name);

}  // namespace bform
