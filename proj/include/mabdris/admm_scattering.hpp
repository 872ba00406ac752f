#pragma once

#include <vector>

#include "mabdris/bdris_core.hpp"
#include "mabdris/fp_metrics.hpp"

namespace mabdris {

struct AdmmConfig {
  double penalty = 0.5;   // rho in the augmented Lagrangian
  double proximal = 0.1;  // xi on the B-block
  double tolerance = 1e-5;
  int max_iterations = 300;
  double reference_impedance = 50.0;
  // Solve in units where the RIS-UE channels have unit RMS entries.
  bool normalize_channels = true;
};

/// Real-valued data of the B-subproblem min (rho/2)||B M - Gamma||_F^2 + (xi/2)||x - x^t||^2.
struct BSubproblem {
  Eigen::MatrixXd M;      // M x 2K
  Eigen::MatrixXd Gamma;  // M x 2K
};

BSubproblem build_b_subproblem(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& hu,
                               const Eigen::MatrixXcd& lambda, double z0, double penalty);

/// ||A x - b||^2 == ||B M - Gamma||_F^2 for x = pack_upper(B); b is Gamma flattened row-major.
struct LinearMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

LinearMap assemble_linear_map(const BSubproblem& sub, const RisArchitecture& arch);

/// x = (A^T A + (xi/rho) I)^-1 (A^T b + (xi/rho) x_prev) via a Cholesky solve.
Eigen::VectorXd b_step(const LinearMap& map, const Eigen::VectorXd& x_prev, double penalty,
                       double proximal);

/// Same minimizer as b_step, computed group by group in the eigenbasis of M_g M_g^T
/// without forming A. Cost O(N_E^4) per group instead of O(N_E^6).
Eigen::VectorXd b_step_blocked(const BSubproblem& sub, const RisArchitecture& arch,
                               const Eigen::VectorXd& x_prev, double penalty, double proximal);

/// Closed-form U update; `hw` is H W (M x K), `hu` the RIS-UE channels.
Eigen::MatrixXcd u_step(const AdmittanceMatrix& b, const Eigen::MatrixXcd& hw,
                        const Eigen::MatrixXcd& hu, const FpAuxiliaries& aux,
                        const Eigen::MatrixXcd& lambda, double penalty);

/// Lambda + rho ((I - j Z0 B) U - (I + j Z0 B) H_U).
Eigen::MatrixXcd dual_step(const AdmittanceMatrix& b, const Eigen::MatrixXcd& u,
                           const Eigen::MatrixXcd& hu, const Eigen::MatrixXcd& lambda,
                           double penalty);

/// (I - j Z0 B) U - (I + j Z0 B) H_U
Eigen::MatrixXcd constraint_residual(const AdmittanceMatrix& b, const Eigen::MatrixXcd& u,
                                     const Eigen::MatrixXcd& hu);

/// Warm-start data carried between outer iterations.
struct AdmmState {
  AdmittanceMatrix B;
  Eigen::MatrixXcd lambda;  // in normalized units
  double scale = 1.0;
  bool initialized = false;
};

struct AdmmResult {
  AdmittanceMatrix B;
  ScatteringMatrix theta;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_trace;
};

AdmmResult run_admm(const ChannelSet& ch, const Eigen::MatrixXcd& w, const FpAuxiliaries& aux,
                    const RisArchitecture& arch, const AdmmConfig& cfg, AdmmState& state);

}  // namespace mabdris
