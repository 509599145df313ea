#include "bipolar_formation/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bipolar_formation/controllers.hpp"
#include "bipolar_formation/error.hpp"
#include "bipolar_formation/ppc.hpp"
#include "bipolar_formation/presets.hpp"

namespace bform {

namespace {

constexpr double kFdStep = 1e-6;

double relative_gap(const Vec2& a, const Vec2& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

Vec2 polar(double radius, double angle) {
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Random follower triangle: p_k with neighbors at the given distances and
// counterclockwise angle alpha from z_ki to z_kj.
struct Triangle {
  Vec2 p_i, p_j, p_k;
};

Triangle random_triangle(std::mt19937_64& rng, double alpha, double d_ki, double d_kj) {
  std::uniform_real_distribution<double> where(-5.0, 5.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  Triangle tri;
  tri.p_k = {where(rng), where(rng)};
  const double phi = phase(rng);
  tri.p_i = tri.p_k + polar(d_ki, phi);
  tri.p_j = tri.p_k + polar(d_kj, phi + alpha);
  return tri;
}

// Keeps samples off the funnel edge, where the command amplifies roundoff by
// about 1 / (1 - |e_tilde| / b).
bool well_inside(const PpcChannel& ch, const ChannelState& s) {
  return s.e_tilde < 0.99 * ch.b_upper && s.e_tilde > -0.99 * ch.b_lower;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Vec2> reconstruct_target_positions(const FormationGraph& graph,
                                               const DesiredFormation& desired, const Vec2& p1,
                                               double p2_dir,
                                               const std::optional<std::vector<AgentId>>& order) {
  const int n = graph.agent_count();
  std::vector<Vec2> p(static_cast<std::size_t>(n));
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  const double d21 = desired.distance(2, 1);
  p[0] = p1;
  p[1] = p1 + polar(d21, p2_dir + kPi);
  placed[0] = placed[1] = true;
  const auto sequence = order ? *order : construction_order(graph);
  for (AgentId k : sequence) {
    const auto nb = graph.follower_neighbors(k);
    if (!nb || !placed[nb->i - 1] || !placed[nb->j - 1]) {
      throw FormationError(ErrorCode::kInvalidArgument,
                           "agent " + std::to_string(k) + " placed before its neighbors");
    }
    const FocalFrame frame = make_focal_frame(p[nb->i - 1], p[nb->j - 1]);
    const Vec2 local =
        bipolar_to_cartesian({desired.r_star.at(k), desired.alpha_star.at(k), frame.c});
    p[k - 1] = frame.to_world(local);
    placed[k - 1] = true;
  }
  if (std::find(placed.begin(), placed.end(), false) != placed.end()) {
    throw FormationError(ErrorCode::kInvalidArgument, "construction order misses an agent");
  }
  for (const auto& e : graph.edges()) {
    const double d_star = desired.distance(e.from, e.to);
    const double d = (p[e.to - 1] - p[e.from - 1]).norm();
    if (std::abs(d - d_star) > 1e-9 * std::max(1.0, d_star)) {
      std::ostringstream os;
      os << "reconstructed edge (" << e.from << "," << e.to << ") has length " << d
         << " instead of " << d_star;
      throw FormationError(ErrorCode::kInconsistentTriangle, os.str());
    }
  }
  return p;
}

double check_basis_by_finite_difference(double r, double alpha, double c, const Vec2& z_ji,
                                        const BasisFn& basis) {
  if (!(std::cosh(r) - std::cos(alpha) > 1e-6)) {
    throw FormationError(ErrorCode::kFocalSingularity, "too close to a focus for differencing");
  }
  const double q = bipolar_scale_factor({r, alpha, c});
  const double h = kFdStep;
  const Vec2 d_alpha = (bipolar_to_cartesian({r, alpha + h, c}) -
                        bipolar_to_cartesian({r, alpha - h, c})) / (2.0 * h * q);
  const Vec2 d_r = (bipolar_to_cartesian({r + h, alpha, c}) -
                    bipolar_to_cartesian({r - h, alpha, c})) / (2.0 * h * q);
  const BipolarBasis b = basis(r, alpha, z_ji);
  const Vec2 x_axis = -z_ji;
  const Vec2 y_axis = rotate90_cw(z_ji);
  const Vec2 r_local{dot(b.r_hat, x_axis), dot(b.r_hat, y_axis)};
  const Vec2 a_local{dot(b.alpha_hat, x_axis), dot(b.alpha_hat, y_axis)};
  return std::max(relative_gap(r_local, d_r), relative_gap(a_local, d_alpha));
}

double AngleRateCheck::max_deviation() const {
  return std::max(std::abs(analytic_alpha_rate - numeric_alpha_rate),
                  std::abs(analytic_r_rate - numeric_r_rate));
}

AngleRateCheck check_angle_rate(const Vec2& p_i, const Vec2& p_j, const Vec2& p_k,
                                const Vec2& v_i, const Vec2& v_j, const Vec2& v_k) {
  const Vec2 p_ki = p_i - p_k;
  const Vec2 p_kj = p_j - p_k;
  const double n_ki = p_ki.norm();
  const double n_kj = p_kj.norm();
  if (!(n_ki > kEpsPos && n_kj > kEpsPos) || !((p_i - p_j).norm() > kEpsPos)) {
    throw FormationError(ErrorCode::kDegenerateTriangle, "triangle has coincident vertices");
  }
  const Vec2 z_ki = p_ki / n_ki;
  const Vec2 z_kj = p_kj / n_kj;
  const Vec2 w_ki = v_i - v_k;
  const Vec2 w_kj = v_j - v_k;
  AngleRateCheck out;
  out.analytic_alpha_rate = dot(z_ki, rotate90(w_ki)) / n_ki - dot(z_kj, rotate90(w_kj)) / n_kj;
  out.analytic_r_rate = dot(z_ki, w_ki) / n_ki - dot(z_kj, w_kj) / n_kj;

  const double h = kFdStep;
  const auto at = [&](double s) {
    const Vec2 qi = p_i + v_i * s;
    const Vec2 qj = p_j + v_j * s;
    const Vec2 qk = p_k + v_k * s;
    return std::pair{edge_angle(bearing(qk, qi), bearing(qk, qj)),
                     std::log((qi - qk).norm() / (qj - qk).norm())};
  };
  const auto plus = at(h);
  const auto minus = at(-h);
  out.numeric_alpha_rate = (plus.first - minus.first) / (2.0 * h);
  out.numeric_r_rate = (plus.second - minus.second) / (2.0 * h);
  return out;
}

PositivityResult sample_mk_positivity(std::size_t num_samples, std::uint64_t seed,
                                      double angle_margin, double d_min, double d_max) {
  if (!(angle_margin > 0.0 && angle_margin < kPi) || !(d_min > 0.0 && d_max >= d_min)) {
    throw FormationError(ErrorCode::kInvalidArgument, "bad sampling domain");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(angle_margin, kTwoPi - angle_margin);
  std::uniform_real_distribution<double> dist(d_min, d_max);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  PositivityResult res;
  res.worst.m_k = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < num_samples; ++s) {
    const double alpha = angle(rng);
    const double d_ki = dist(rng);
    const double d_kj = dist(rng);
    const Triangle tri = random_triangle(rng, alpha, d_ki, d_kj);
    const Vec2 z_ki = bearing(tri.p_k, tri.p_i);
    const Vec2 z_kj = bearing(tri.p_k, tri.p_j);
    const double ratio = (tri.p_i - tri.p_k).norm() / (tri.p_j - tri.p_k).norm();
    const Vec2 z_ji = reconstruct_neighbor_bearing(z_ki, z_kj, ratio);
    const BipolarBasis b = bipolar_basis(std::log(ratio), edge_angle(z_ki, z_kj), z_ji);
    const Vec2 eta = z_kj / (tri.p_j - tri.p_k).norm() - z_ki / (tri.p_i - tri.p_k).norm();
    const double m = dot(eta, b.r_hat);
    const double eta_norm = eta.norm();
    res.max_norm_residual = std::max(res.max_norm_residual, std::abs(m - eta_norm) / eta_norm);

    // M = G B with G = [eta^T; eta^T J] and B = [r_hat | alpha_hat].
    const double m11 = dot(eta, b.r_hat);
    const double m12 = dot(eta, b.alpha_hat);
    const double m21 = dot(eta, rotate90(b.r_hat));
    const double m22 = dot(eta, rotate90(b.alpha_hat));
    const double x1 = unit(rng);
    const double x2 = unit(rng);
    const double quad = x1 * (m11 * x1 + m12 * x2) + x2 * (m21 * x1 + m22 * x2);
    const double expect = m * (x1 * x1 + x2 * x2);
    res.max_quadratic_residual =
        std::max(res.max_quadratic_residual, std::abs(quad - expect) / std::abs(expect));

    if (m < res.worst.m_k) {
      res.worst = {tri.p_i, tri.p_j, tri.p_k, m, alpha, d_ki, d_kj};
    }
    ++res.samples;
  }
  return res;
}

bool strong_congruency_check(const std::vector<Vec2>& positions, const DesiredFormation& desired,
                             const FormationGraph& graph, double tol) {
  if (static_cast<int>(positions.size()) != graph.agent_count()) return false;
  try {
    for (const auto& e : graph.edges()) {
      const double d = (positions[e.to - 1] - positions[e.from - 1]).norm();
      if (!(std::abs(d - desired.distance(e.from, e.to)) < tol)) return false;
    }
    for (AgentId k : construction_order(graph)) {
      const auto nb = *graph.follower_neighbors(k);
      const Vec2& pk = positions[k - 1];
      const double alpha =
          edge_angle(bearing(pk, positions[nb.i - 1]), bearing(pk, positions[nb.j - 1]));
      if (!(std::abs(alpha - desired.alpha_star.at(k)) < tol)) return false;
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

ShapeResiduals shape_residuals(const std::vector<Vec2>& positions,
                               const DesiredFormation& desired, const FormationGraph& graph) {
  ShapeResiduals res;
  for (const auto& e : graph.edges()) {
    const double d_star = desired.distance(e.from, e.to);
    const double d = (positions[e.to - 1] - positions[e.from - 1]).norm();
    res.objective = std::max(res.objective, std::abs(d - d_star) / d_star);
  }
  const double d21 = (positions[0] - positions[1]).norm();
  const double d21_star = desired.distance(2, 1);
  res.bipolar = std::abs(d21 - d21_star) / d21_star;
  for (AgentId k : construction_order(graph)) {
    const auto nb = *graph.follower_neighbors(k);
    const BipolarPoint bp =
        bipolar_from_positions(positions[nb.i - 1], positions[nb.j - 1], positions[k - 1]);
    const double angle_err = std::abs(bp.alpha - desired.alpha_star.at(k));
    res.objective = std::max(res.objective, angle_err);
    res.bipolar = std::max({res.bipolar, angle_err, std::abs(bp.r - desired.r_star.at(k))});
  }
  return res;
}

EquivalenceResult check_shape_equivalence(const FormationGraph& graph,
                                          const DesiredFormation& desired,
                                          std::size_t num_samples, std::uint64_t seed,
                                          double gain) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> where(-10.0, 10.0);
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  std::uniform_real_distribution<double> decade(-8.0, -2.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& [edge, d] : desired.d_star) {
    (void)edge;
    shortest = std::min(shortest, d);
  }
  EquivalenceResult res;
  const auto exact = reconstruct_target_positions(graph, desired, {0.0, 0.0}, 0.0);
  const auto r0 = shape_residuals(exact, desired, graph);
  res.exact_residual = std::max(r0.objective, r0.bipolar);
  for (std::size_t s = 0; s < num_samples; ++s) {
    auto p = reconstruct_target_positions(graph, desired, {where(rng), where(rng)}, heading(rng));
    const double scale = std::pow(10.0, decade(rng)) * shortest;
    for (auto& q : p) q += Vec2{noise(rng), noise(rng)} * scale;
    const auto r = shape_residuals(p, desired, graph);
    const double forward = r.bipolar / r.objective;
    const double backward = r.objective / r.bipolar;
    res.worst_forward_ratio = std::max(res.worst_forward_ratio, forward);
    res.worst_backward_ratio = std::max(res.worst_backward_ratio, backward);
    if (!(forward <= gain && backward <= gain)) ++res.failures;
    ++res.samples;
  }
  return res;
}

double check_ppc_derivatives(std::size_t num_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bound(0.1, 10.0);
  std::uniform_real_distribution<double> level(0.02, 1.0);
  std::uniform_real_distribution<double> frac(-0.95, 0.95);
  double worst = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    PpcChannel ch;
    ch.b_lower = bound(rng);
    ch.b_upper = bound(rng);
    const double rho_t = level(rng);
    const double f = frac(rng);
    const double e_tilde = f >= 0.0 ? f * ch.b_upper : f * ch.b_lower;
    const double e = e_tilde * rho_t;
    const double h = 1e-4 * rho_t * std::min(e_tilde + ch.b_lower, ch.b_upper - e_tilde);
    const double fd = (transform(ch, (e + h) / rho_t) - transform(ch, (e - h) / rho_t)) / (2.0 * h);
    const double analytic = xi(ch, e_tilde, rho_t);
    worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
    const double back = inverse_transform(ch, transform(ch, e_tilde));
    worst = std::max(worst, std::abs(back - e_tilde) / std::max(1.0, std::abs(e_tilde)));
  }
  return worst;
}

double check_frame_invariance(std::size_t num_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.3, kTwoPi - 0.3);
  std::uniform_real_distribution<double> dist(0.5, 5.0);
  std::uniform_real_distribution<double> turn(0.0, kTwoPi);
  std::uniform_real_distribution<double> log_ratio_star(-1.0, 1.0);
  std::uniform_real_distribution<double> when(0.0, 2.0);
  std::uniform_real_distribution<double> bearing_star(-2.5, 2.5);
  const PerformanceFunction perf{0.5, 0.04};
  const auto gap = [](const Vec2& turned, const Vec2& reference) {
    return (turned - reference).norm() / std::max(1.0, reference.norm());
  };
  double worst = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const Triangle tri = random_triangle(rng, angle(rng), dist(rng), dist(rng));
    FollowerSnapshot snap;
    snap.z_ki = bearing(tri.p_k, tri.p_i);
    snap.z_kj = bearing(tri.p_k, tri.p_j);
    snap.ratio_kij = (tri.p_i - tri.p_k).norm() / (tri.p_j - tri.p_k).norm();
    const FollowerTarget target{log_ratio_star(rng), angle(rng)};
    const auto e0 = follower_errors(snap, target);
    const FollowerChannels ch{select_bounds_ratio(perf, e0.e_r),
                              select_bounds_angle(target.alpha_star, perf, e0.e_alpha)};
    const double t = when(rng);
    const double theta = turn(rng);
    try {
      const auto out = evaluate_follower(snap, ch, target, t);
      if (well_inside(ch.ratio, out.ratio) && well_inside(ch.angle, out.angle)) {
        FollowerSnapshot local = snap;
        local.z_ki = rotate(-theta, snap.z_ki);
        local.z_kj = rotate(-theta, snap.z_kj);
        const Vec2 back = rotate(theta, control_follower(local, ch, target, t).velocity);
        worst = std::max(worst, gap(back, out.command.velocity));
      }
    } catch (const OutOfBoundsError&) {
      // The funnel has shrunk past this random error; nothing to compare.
    }

    SecondaryLeaderSnapshot lead;
    lead.z_21 = polar(1.0, turn(rng));
    lead.dist_21 = dist(rng);
    lead.d_star = dist(rng);
    lead.beta_star = bearing_star(rng);
    lead.reference_rotation = turn(rng);
    const auto e2 = secondary_leader_errors(lead);
    SecondaryLeaderChannels lc;
    const ReferenceFn d_ref = [&](double) { return lead.d_star; };
    const ReferenceFn b_ref = [&](double) { return *lead.beta_star; };
    const BoundGrid grid{2.0, 0.01};
    try {
      lc.distance = select_bounds_distance(d_ref, perf, e2.e_d, grid);
      lc.bearing = select_bounds_bearing(b_ref, perf, *e2.e_beta, grid);
      const auto out = evaluate_secondary(lead, lc, 0.0);
      if (well_inside(lc.distance, out.distance) && well_inside(*lc.bearing, *out.bearing)) {
        SecondaryLeaderSnapshot local = lead;
        local.z_21 = rotate(-theta, lead.z_21);
        local.reference_rotation = lead.reference_rotation - theta;
        const Vec2 back = rotate(theta, control_secondary(local, lc, 0.0).velocity);
        worst = std::max(worst, gap(back, out.command.velocity));
      }
    } catch (const FormationError&) {
      // Initial bearing error outside the selectable band.
    }
  }
  return worst;
}

std::vector<VerifyRow> run_verify_suite(std::uint64_t seed, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 1);
  std::vector<VerifyRow> rows;

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"bipolar basis vs finite differences", false, 0.0, 1e-5, 0, 0.0, ""};
    const auto side = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(samples))));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> turn(0.0, kTwoPi);
    for (std::size_t a = 0; a < side; ++a) {
      for (std::size_t b = 0; b < side; ++b) {
        for (std::size_t c = 0; c < side; ++c) {
          const double u = (static_cast<double>(a) + 0.5) / static_cast<double>(side);
          const double v = (static_cast<double>(b) + 0.5) / static_cast<double>(side);
          const double w = (static_cast<double>(c) + 0.5) / static_cast<double>(side);
          const double r = -2.0 + 4.0 * u;
          const double alpha = 0.1 + (kTwoPi - 0.2) * v;
          const double focal = 0.25 + 2.75 * w;
          const double dev = check_basis_by_finite_difference(r, alpha, focal, polar(1.0, turn(rng)));
          row.worst = std::max(row.worst, dev);
          ++row.count;
        }
      }
    }
    row.pass = row.worst < row.threshold;
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"edge-angle and ratio rates", false, 0.0, 1e-5, 0, 0.0, ""};
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> angle(0.2, kTwoPi - 0.2);
    std::uniform_real_distribution<double> dist(0.3, 5.0);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    for (std::size_t s = 0; s < samples; ++s) {
      const Triangle tri = random_triangle(rng, angle(rng), dist(rng), dist(rng));
      const auto chk = check_angle_rate(tri.p_i, tri.p_j, tri.p_k, {vel(rng), vel(rng)},
                                        {vel(rng), vel(rng)}, {vel(rng), vel(rng)});
      row.worst = std::max(row.worst, chk.max_deviation());
      ++row.count;
    }
    row.pass = row.worst < row.threshold;
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"m_k positivity", false, 0.0, 0.0, 0, 0.0, ""};
    const auto res = sample_mk_positivity(100 * samples, seed + 2, 0.05);
    row.worst = res.worst.m_k;
    row.count = res.samples;
    row.pass = res.worst.m_k > 0.0 && res.max_norm_residual < 1e-10 &&
               res.max_quadratic_residual < 1e-10;
    row.detail = "min m_k " + fmt(res.worst.m_k) + ", |m-|eta|| " + fmt(res.max_norm_residual) +
                 ", quadratic form " + fmt(res.max_quadratic_residual);
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"shape objective <=> bipolar conditions", false, 0.0, 100.0, 0, 0.0, ""};
    const Formation sec4 = sec4_formation();
    const Formation henneberg = random_henneberg_formation(10, seed + 3);
    std::size_t failures = 0;
    double exact = 0.0;
    for (const Formation* f : {&sec4, &henneberg}) {
      const auto res = check_shape_equivalence(f->graph, f->desired, (samples + 1) / 2, seed + 4);
      failures += res.failures;
      row.count += res.samples;
      row.worst = std::max({row.worst, res.worst_forward_ratio, res.worst_backward_ratio});
      exact = std::max(exact, res.exact_residual);
    }
    row.pass = failures == 0 && exact < 1e-9;
    row.detail = "worst residual ratio " + fmt(row.worst) + ", exact residual " + fmt(exact);
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"PPC transform derivative", false, 0.0, 1e-6, samples, 0.0, ""};
    row.worst = check_ppc_derivatives(samples, seed + 5);
    row.pass = row.worst < row.threshold;
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"local frame invariance", false, 0.0, 1e-12, samples, 0.0, ""};
    row.worst = check_frame_invariance(samples, seed + 6);
    row.pass = row.worst < row.threshold;
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }

  {
    const auto start = std::chrono::steady_clock::now();
    VerifyRow row{"strong congruency", false, 0.0, 1e-8, 3, 0.0, ""};
    const Formation sec4 = sec4_formation();
    const auto target = reconstruct_target_positions(sec4.graph, sec4.desired, {0.0, 0.0}, 0.3);
    std::vector<Vec2> mirrored = target;
    std::vector<Vec2> moved = target;
    for (auto& p : mirrored) p = {p.x, -p.y};
    for (auto& p : moved) p = rotate(1.1, p) + Vec2{3.0, -2.0};
    const bool a = strong_congruency_check(target, sec4.desired, sec4.graph, 1e-8);
    const bool b = !strong_congruency_check(mirrored, sec4.desired, sec4.graph, 1e-8);
    const bool c = strong_congruency_check(moved, sec4.desired, sec4.graph, 1e-8);
    row.pass = a && b && c;
    row.worst = row.pass ? 0.0 : 1.0;
    row.detail = std::string("target ") + (a ? "accepted" : "REJECTED") + ", mirror " +
                 (b ? "rejected" : "ACCEPTED") + ", rigid copy " + (c ? "accepted" : "REJECTED");
    row.seconds = elapsed_since(start);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bform
