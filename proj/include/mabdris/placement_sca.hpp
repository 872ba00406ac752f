#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mabdris/bdris_core.hpp"
#include "mabdris/channel_model.hpp"
#include "mabdris/fp_metrics.hpp"

namespace mabdris {

/// Position-independent part of the placement objective for a fixed (Theta, W, rho, psi).
///
/// For group g and users (k, k') the matrix C_{g,k,k'} (L_r x L_t) satisfies
///   f(c_g)^H C_{g,k,k'} g_k(c_g) = psi_k^* [h_k^H Theta H w_{k'}]_{group g},
/// i.e. the contribution of group g to the cross gain, with the intra-group
/// offsets folded into per-path phase factors.
struct PlacementProblem {
  int num_groups = 0;
  int num_users = 0;
  double wavelength = 0.01;
  PathAngles rx_angles;               // RIS arrival angles (f)
  std::vector<PathAngles> tx_angles;  // per-UE RIS departure angles (g_k)
  Eigen::MatrixX2d rx_proj;
  std::vector<Eigen::MatrixX2d> tx_proj;
  Eigen::VectorXd rho;
  // base[g][k * K + k']
  std::vector<std::vector<Eigen::MatrixXcd>> base;

  const Eigen::MatrixXcd& c(int g, int k, int kp) const { return base[g][k * num_users + kp]; }
  /// f(c)^H C_{g,k,k'} g_k(c)
  cplx group_response(int g, int k, int kp, const Vec2& c) const;
};

PlacementProblem prepare_placement(const SystemGeometry& geometry, const PathEnvironment& env,
                                   const ScatteringMatrix& theta, const Eigen::MatrixXcd& w,
                                   const FpAuxiliaries& aux);

/// Coefficients of mu(c_g) with every other group frozen.
struct PlacementCoefficients {
  int group = 0;
  int num_users = 0;
  double wavelength = 0.01;
  Eigen::MatrixX2d rx_proj;
  std::vector<Eigen::MatrixX2d> tx_proj;
  std::vector<Eigen::MatrixXcd> C;  // index k * K + k'
  std::vector<Eigen::MatrixXcd> D;  // index k
  std::vector<Eigen::MatrixXcd> E;  // index k
  Eigen::MatrixXcd a;               // cross-group accumulation a_{g,k,k'}

  const Eigen::MatrixXcd& c(int k, int kp) const { return C[k * num_users + kp]; }
};

PlacementCoefficients build_coefficients(const PlacementProblem& prob,
                                         std::span<const Vec2> refs, int group);

/// mu(c) = sum_k [ -sum_k' |f^H C_{kk'} g_k|^2 + 2 Re{f^H E_k g_k} ].
double mu(const PlacementCoefficients& co, const Vec2& c);
Vec2 gradient_mu(const PlacementCoefficients& co, const Vec2& c);

/// (8 pi^2 / lambda^2) (sum_{k,k'} (sum |C_{kk'}|)^2 + 2 sum_k sum |E_k|).
double curvature_bound_frobenius(const PlacementCoefficients& co);
/// Triangle-inequality bound using the actual per-term phase gradients.
double curvature_bound_exact_terms(const PlacementCoefficients& co);
/// max of the two bounds above; always dominates ||Hessian(mu)||_2.
double curvature_bound(const PlacementCoefficients& co);

/// Quadratic minorant of mu around `expansion_point`.
struct SurrogateModel {
  Vec2 expansion_point = Vec2::Zero();
  Vec2 gradient = Vec2::Zero();
  double curvature = 0.0;
  double value = 0.0;  // mu(expansion_point)

  double operator()(const Vec2& c) const {
    const Vec2 d = c - expansion_point;
    return value + gradient.dot(d) - 0.5 * curvature * d.squaredNorm();
  }
};

SurrogateModel build_surrogate(const PlacementCoefficients& co, const Vec2& expansion_point);

/// n . c >= offset
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;
};

/// Euclidean projection of `target` onto a nonempty intersection of half-planes, by
/// enumerating the interior point, single-edge projections and pairwise vertices.
/// Returns nullopt if no candidate is feasible.
std::optional<Vec2> project_onto_halfplanes(const Vec2& target, std::span<const HalfPlane> planes,
                                            double tol = 1e-12);

/// Box edges plus the spacing constraints linearized at `current`.
std::vector<HalfPlane> placement_constraints(const SystemGeometry& geometry, int group,
                                             const Vec2& current);

struct ScaStep {
  Vec2 next = Vec2::Zero();
  SurrogateModel surrogate;
  bool infeasible = false;
};

/// Maximizes the surrogate over the linearized feasible set of group `group`,
/// expanding around geometry.group_refs[group].
ScaStep sca_group_step(const PlacementCoefficients& co, const SystemGeometry& geometry, int group);

struct PlacementConfig {
  double tol_position_wavelengths = 1e-4;
  int max_sweeps = 20;
};

struct PlacementResult {
  std::vector<Vec2> refs;
  int sweeps = 0;
  bool converged = false;
  int rejected_steps = 0;
  bool infeasible = false;
};

/// Round-robin SCA over groups in ascending order; a step whose true mu falls below
/// the starting value is rolled back.
PlacementResult optimize_positions(const PlacementProblem& prob, const SystemGeometry& geometry,
                                   const PlacementConfig& cfg);

}  // namespace mabdris
