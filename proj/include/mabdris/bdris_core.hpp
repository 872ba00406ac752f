#pragma once

#include <string>
#include <vector>

#include "mabdris/types.hpp"

namespace mabdris {

enum class Connectivity { kSingle, kGroup, kFully };

/// Group-connected BD-RIS: M = num_groups * group_size elements, block-diagonal
/// scattering with one block per group.
class RisArchitecture {
 public:
  RisArchitecture(int num_groups, int group_size);

  /// Throws ConfigError unless group_size divides total.
  static RisArchitecture from_total(int total, int group_size);

  int num_groups() const { return num_groups_; }
  int group_size() const { return group_size_; }
  int total() const { return num_groups_ * group_size_; }
  Connectivity kind() const;
  /// Number of free real parameters: N_G * N_E (N_E + 1) / 2.
  int packed_size() const { return num_groups_ * group_size_ * (group_size_ + 1) / 2; }
  std::string label() const;

  friend bool operator==(const RisArchitecture&, const RisArchitecture&) = default;

 private:
  int num_groups_;
  int group_size_;
};

/// Purely imaginary admittance Y = jB with real symmetric block-diagonal B.
struct AdmittanceMatrix {
  std::vector<Eigen::MatrixXd> blocks;
  double reference_impedance = 50.0;

  static AdmittanceMatrix zero(const RisArchitecture& arch, double z0 = 50.0);
  RisArchitecture architecture() const;
  Eigen::MatrixXd dense() const;
};

struct ScatteringMatrix {
  std::vector<Eigen::MatrixXcd> blocks;

  static ScatteringMatrix identity(const RisArchitecture& arch);
  Eigen::MatrixXcd dense() const;
};

/// Theta_g = (I + j Z0 B_g)^-1 (I - j Z0 B_g), evaluated in the eigenbasis of B_g.
ScatteringMatrix admittance_to_scattering(const AdmittanceMatrix& b);

struct ScatteringReport {
  double unitarity = 0.0;   // ||Theta^H Theta - I||_F
  double symmetry = 0.0;    // ||Theta - Theta^T||_F
  double block_leak = 0.0;  // Frobenius norm of entries outside the diagonal blocks
  bool pass = false;

  double max_violation() const;
};

struct ScatteringTolerance {
  double unitarity = 1e-8;
  double symmetry = 1e-10;
  double block_leak = 1e-12;
};

ScatteringReport validate_scattering(const Eigen::MatrixXcd& theta, const RisArchitecture& arch,
                                     const ScatteringTolerance& tol = {});

/// Packs the upper triangles of the blocks (group order, row-major within a block).
/// Throws std::invalid_argument if a block is not exactly symmetric.
Eigen::VectorXd pack_upper(const AdmittanceMatrix& b);
AdmittanceMatrix unpack_upper(const Eigen::VectorXd& x, const RisArchitecture& arch,
                              double z0 = 50.0);

}  // namespace mabdris
