#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bipolar_formation/formation_graph.hpp"
#include "bipolar_formation/geometry.hpp"

namespace bform {

/// Places every agent of the desired formation: p_1 given, p_2 so that the
/// bearing from 2 to 1 has direction p2_dir, then each follower from its
/// placed neighbors via its desired (r*, alpha*). `order` overrides the
/// construction order; it must place both neighbors before each follower.
std::vector<Vec2> reconstruct_target_positions(
    const FormationGraph& graph, const DesiredFormation& desired, const Vec2& p1, double p2_dir,
    const std::optional<std::vector<AgentId>>& order = std::nullopt);

using BasisFn = std::function<BipolarBasis(double r, double alpha, const Vec2& z_ji)>;

/// Central differences (h = 1e-6) of the bipolar map in {C_k}, divided by the
/// scale factor, against the basis returned by `basis` rotated into {C_k}.
/// Returns the largest deviation over both directions.
double check_basis_by_finite_difference(double r, double alpha, double c, const Vec2& z_ji,
                                        const BasisFn& basis = bipolar_basis);

struct AngleRateCheck {
  double analytic_alpha_rate = 0.0;
  double numeric_alpha_rate = 0.0;
  double analytic_r_rate = 0.0;
  double numeric_r_rate = 0.0;

  double max_deviation() const;
};

/// Edge-angle and log-ratio rates of follower k from the relative-velocity
/// formulas, and from central differences (h = 1e-6 s) along the straight
/// flow p + h v.
AngleRateCheck check_angle_rate(const Vec2& p_i, const Vec2& p_j, const Vec2& p_k,
                                const Vec2& v_i, const Vec2& v_j, const Vec2& v_k);

struct PositivitySample {
  Vec2 p_i;
  Vec2 p_j;
  Vec2 p_k;
  double m_k = 0.0;
  double alpha = 0.0;
  double dist_ki = 0.0;
  double dist_kj = 0.0;
};

struct PositivityResult {
  std::size_t samples = 0;
  PositivitySample worst;             // sample with the smallest m_k
  double max_norm_residual = 0.0;     // |m_k - |eta_k|| / |eta_k|
  double max_quadratic_residual = 0.0;  // |x^T M x - m |x|^2| / (m |x|^2)
};

/// m_k = eta_k^T r_hat_k on random triangles with alpha in (margin,
/// 2pi - margin) and neighbor distances in [d_min, d_max].
PositivityResult sample_mk_positivity(std::size_t num_samples, std::uint64_t seed,
                                      double angle_margin, double d_min = 0.1,
                                      double d_max = 10.0);

/// True iff every edge length is within tol of d* and every follower's
/// edge-angle within tol of alpha*.
bool strong_congruency_check(const std::vector<Vec2>& positions, const DesiredFormation& desired,
                             const FormationGraph& graph, double tol);

// Worst-case mismatch of the distance/angle objective and of the bipolar
// conditions for one configuration.
struct ShapeResiduals {
  double objective = 0.0;  // max relative edge error and absolute angle error
  double bipolar = 0.0;    // max of |d21 - d*|/d*, |r - r*|, |alpha - alpha*|
};

ShapeResiduals shape_residuals(const std::vector<Vec2>& positions,
                               const DesiredFormation& desired, const FormationGraph& graph);

struct EquivalenceResult {
  std::size_t samples = 0;
  std::size_t failures = 0;
  double worst_forward_ratio = 0.0;   // bipolar / objective
  double worst_backward_ratio = 0.0;  // objective / bipolar
  double exact_residual = 0.0;        // both residuals at the target itself
};

/// Perturbs the target shape by random amounts over six decades and checks
/// that each residual bounds the other within a factor `gain`.
EquivalenceResult check_shape_equivalence(const FormationGraph& graph,
                                          const DesiredFormation& desired,
                                          std::size_t num_samples, std::uint64_t seed,
                                          double gain = 100.0);

/// Largest relative gap between xi and the central difference of
/// sigma(e / rho) in e, plus the inverse-transform round trip, on random
/// channels.
double check_ppc_derivatives(std::size_t num_samples, std::uint64_t seed);

/// Worst relative command mismatch of the follower and secondary-leader laws
/// under random frame rotations. States within 1% of a band edge are skipped.
double check_frame_invariance(std::size_t num_samples, std::uint64_t seed);

struct VerifyRow {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double threshold = 0.0;
  std::size_t count = 0;
  double seconds = 0.0;
  std::string detail;
};

/// The full oracle suite. `samples` scales every check: basis grid and
/// per-state checks use about `samples` points, m_k positivity 100x that.
std::vector<VerifyRow> run_verify_suite(std::uint64_t seed, std::size_t samples);

}  // namespace bform
