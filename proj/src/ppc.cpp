#include "bipolar_formation/ppc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/geometry.hpp"

namespace bform {

namespace {

// Smallest value of f(t) / rho(t) over the bound-selection grid.
double grid_inf_over_rho(const ReferenceFn& f, const PerformanceFunction& perf,
                         const BoundGrid& grid) {
  const auto steps = static_cast<long>(std::ceil(grid.horizon / grid.dt));
  double best = std::numeric_limits<double>::infinity();
  for (long s = 0; s <= steps; ++s) {
    const double t = std::min(grid.horizon, static_cast<double>(s) * grid.dt);
    best = std::min(best, f(t) / rho(perf, t));
  }
  return best;
}

[[noreturn]] void infeasible(const char* channel, double e0, double lo, double hi) {
  std::ostringstream os;
  os << channel << " channel: initial error " << e0 << " is not strictly inside ("
     << lo << ", " << hi << ")";
  throw FormationError(ErrorCode::kInfeasibleInitialError, os.str());
}

}  // namespace

double rho(const PerformanceFunction& perf, double t) {
  return (1.0 - perf.rho_inf) * std::exp(-perf.l * t) + perf.rho_inf;
}

double rho_dot(const PerformanceFunction& perf, double t) {
  return -perf.l * (1.0 - perf.rho_inf) * std::exp(-perf.l * t);
}

double modulated_error(double e, double rho_t) { return e / rho_t; }

double transform(const PpcChannel& ch, double e_tilde) {
  const double lo = ch.b_lower;
  const double hi = ch.b_upper;
  if (!(e_tilde > -lo && e_tilde < hi)) {
    std::ostringstream os;
    os << "modulated error " << e_tilde << " outside (" << -lo << ", " << hi << ")";
    throw OutOfBoundsError("", 0.0, e_tilde, os.str());
  }
  return std::log((hi * e_tilde + hi * lo) / (hi * lo - lo * e_tilde));
}

double inverse_transform(const PpcChannel& ch, double sigma) {
  // Solving exp(sigma) = hi (e + lo) / (lo (hi - e)) for e.
  const double lo = ch.b_lower;
  const double hi = ch.b_upper;
  const double w = std::exp(sigma);
  return lo * hi * (w - 1.0) / (hi + lo * w);
}

double xi(const PpcChannel& ch, double e_tilde, double rho_t) {
  if (!(e_tilde > -ch.b_lower && e_tilde < ch.b_upper)) {
    std::ostringstream os;
    os << "modulated error " << e_tilde << " outside (" << -ch.b_lower << ", " << ch.b_upper
       << ")";
    throw OutOfBoundsError("", 0.0, e_tilde, os.str());
  }
  return (1.0 / rho_t) * (1.0 / (e_tilde + ch.b_lower) - 1.0 / (e_tilde - ch.b_upper));
}

void require_initial_containment(const PpcChannel& ch, double e0, const char* channel_name) {
  const double r0 = rho(ch.perf, 0.0);
  if (!(-ch.b_lower * r0 < e0 && e0 < ch.b_upper * r0)) {
    infeasible(channel_name, e0, -ch.b_lower * r0, ch.b_upper * r0);
  }
}

PpcChannel select_bounds_distance(const ReferenceFn& d_star, const PerformanceFunction& perf,
                                  double e0, const BoundGrid& grid) {
  PpcChannel ch;
  ch.perf = perf;
  const double inf_ratio =
      grid_inf_over_rho([&](double t) { const double d = d_star(t); return d * d; }, perf, grid);
  if (!(inf_ratio > 0.0)) {
    throw FormationError(ErrorCode::kInfeasibleInitialError,
                         "distance reference must stay strictly positive");
  }
  ch.b_lower = kBoundMargin * inf_ratio;
  const double r0 = rho(perf, 0.0);
  ch.b_upper = std::max(ch.b_lower, e0 > 0.0 ? 2.0 * e0 / r0 : 0.0);
  require_initial_containment(ch, e0, "distance");
  return ch;
}

PpcChannel select_bounds_angle(double alpha_star, const PerformanceFunction& perf, double e0) {
  if (!(alpha_star > 0.0 && alpha_star < kTwoPi)) {
    throw FormationError(ErrorCode::kBadAngle, "desired edge-angle must lie in (0, 2pi)");
  }
  PpcChannel ch;
  ch.perf = perf;
  ch.b_lower = alpha_star;
  ch.b_upper = kTwoPi - alpha_star;
  require_initial_containment(ch, e0, "edge-angle");
  return ch;
}

PpcChannel select_bounds_ratio(const PerformanceFunction& perf, double e0) {
  PpcChannel ch;
  ch.perf = perf;
  ch.b_lower = ch.b_upper = std::max(1.0, 2.0 * std::abs(e0));
  require_initial_containment(ch, e0, "ratio");
  return ch;
}

PpcChannel select_bounds_bearing(const ReferenceFn& beta_star, const PerformanceFunction& perf,
                                 double e0, const BoundGrid& grid) {
  PpcChannel ch;
  ch.perf = perf;
  const double lo = grid_inf_over_rho([&](double t) { return kPi + beta_star(t); }, perf, grid);
  const double hi = grid_inf_over_rho([&](double t) { return kPi - beta_star(t); }, perf, grid);
  if (!(lo > 0.0 && hi > 0.0)) {
    throw FormationError(ErrorCode::kInfeasibleInitialError,
                         "bearing reference must stay inside (-pi, pi)");
  }
  ch.b_lower = kBoundMargin * lo;
  ch.b_upper = kBoundMargin * hi;
  require_initial_containment(ch, e0, "bearing");
  return ch;
}

}  // namespace bform
