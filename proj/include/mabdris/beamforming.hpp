#pragma once

#include "mabdris/fp_metrics.hpp"

namespace mabdris {

/// W-block of the FP objective: minimize sum_k w_k^H Q w_k - 2 Re{w_k^H q_k}
/// subject to Tr(W^H W) <= P.
struct BeamformerQuadratics {
  Eigen::MatrixXcd Q;  // N_t x N_t Hermitian PSD
  Eigen::MatrixXcd q;  // N_t x K, column k is q_k
};

BeamformerQuadratics build_quadratics(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                      const FpAuxiliaries& aux);

struct BisectionConfig {
  double power_rtol = 1e-6;
  // lambda (P - Tr(W^H W)) / P
  double slackness_tol = 1e-6;
  int max_halvings = 200;
};

struct BeamformerSolution {
  Eigen::MatrixXcd W;
  double multiplier = 0.0;  // lambda
  double power = 0.0;       // Tr(W^H W)
  int halvings = 0;
};

/// w_k = (Q + lambda I)^-1 q_k with the smallest lambda >= 0 meeting the power budget.
BeamformerSolution solve_beamformer(const BeamformerQuadratics& quad, double power_budget,
                                    const BisectionConfig& cfg = {});

/// Tr(W(lambda)^H W(lambda)); non-increasing in lambda.
double beamformer_power(const BeamformerQuadratics& quad, double lambda);
Eigen::MatrixXcd beamformer_at(const BeamformerQuadratics& quad, double lambda);

/// sum_k w_k^H Q w_k - 2 Re{w_k^H q_k} (to be minimized).
double beamformer_cost(const BeamformerQuadratics& quad, const Eigen::MatrixXcd& w);

/// Maximum-ratio transmission on the effective channel, scaled to total power P.
Eigen::MatrixXcd mrt_beamformer(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                double power_budget);

}  // namespace mabdris
