#pragma once

#include <string>
#include <vector>

#include "mabdris/admm_scattering.hpp"
#include "mabdris/beamforming.hpp"
#include "mabdris/placement_sca.hpp"

namespace mabdris {

enum class Mobility { kMovable, kFixed };

const char* mobility_label(Mobility m);  // "MA" / "FA"

struct OptimizerConfig {
  double transmit_power_w = 0.01;  // 10 dBm
  Mobility mobility = Mobility::kMovable;
  double tol_outer = 1e-4;
  int max_outer = 100;
  // A block update is kept only if it lowers the sum-rate by at most this much.
  double accept_slack = 1e-8;
  BisectionConfig bisection;
  AdmmConfig admm;
  PlacementConfig placement;
};

struct OptimizeResult {
  Eigen::MatrixXcd W;
  AdmittanceMatrix B;
  ScatteringMatrix theta;
  std::vector<Vec2> refs;
  // Sum-rate after initialization and after every block (accepted values only).
  std::vector<double> trace;
  double sum_rate = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  double admm_residual = 0.0;
  int rejected_blocks = 0;
  std::vector<std::string> flags;
};

/// Alternating maximization over (rho, psi) -> W -> B -> c until the relative sum-rate
/// change of an outer iteration drops below tol_outer. Block failures are rethrown as
/// SolverError naming the block.
OptimizeResult optimize(const Scenario& scenario, const RisArchitecture& arch,
                        const OptimizerConfig& cfg);

}  // namespace mabdris
