#include "mabdris/bdris_core.hpp"

#include <algorithm>
#include <limits>

namespace mabdris {

RisArchitecture::RisArchitecture(int num_groups, int group_size)
    : num_groups_(num_groups), group_size_(group_size) {
  if (num_groups <= 0 || group_size <= 0) {
    throw ConfigError("architecture: group count and size must be positive");
  }
}

RisArchitecture RisArchitecture::from_total(int total, int group_size) {
  if (group_size <= 0 || total <= 0 || total % group_size != 0) {
    throw ConfigError("architecture: group size " + std::to_string(group_size) +
                      " does not divide M = " + std::to_string(total));
  }
  return RisArchitecture(total / group_size, group_size);
}

Connectivity RisArchitecture::kind() const {
  if (group_size_ == 1) return Connectivity::kSingle;
  if (num_groups_ == 1) return Connectivity::kFully;
  return Connectivity::kGroup;
}

std::string RisArchitecture::label() const {
  switch (kind()) {
    case Connectivity::kSingle:
      return "single";
    case Connectivity::kFully:
      return "fully";
    case Connectivity::kGroup:
      break;
  }
  return "group" + std::to_string(group_size_);
}

AdmittanceMatrix AdmittanceMatrix::zero(const RisArchitecture& arch, double z0) {
  AdmittanceMatrix b;
  b.reference_impedance = z0;
  b.blocks.assign(arch.num_groups(), Eigen::MatrixXd::Zero(arch.group_size(), arch.group_size()));
  return b;
}

RisArchitecture AdmittanceMatrix::architecture() const {
  if (blocks.empty()) throw ConfigError("admittance: no blocks");
  return RisArchitecture(static_cast<int>(blocks.size()), static_cast<int>(blocks.front().rows()));
}

Eigen::MatrixXd AdmittanceMatrix::dense() const {
  Eigen::Index m = 0;
  for (const auto& blk : blocks) m += blk.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  Eigen::Index at = 0;
  for (const auto& blk : blocks) {
    out.block(at, at, blk.rows(), blk.cols()) = blk;
    at += blk.rows();
  }
  return out;
}

ScatteringMatrix ScatteringMatrix::identity(const RisArchitecture& arch) {
  ScatteringMatrix s;
  s.blocks.assign(arch.num_groups(),
                  Eigen::MatrixXcd::Identity(arch.group_size(), arch.group_size()));
  return s;
}

Eigen::MatrixXcd ScatteringMatrix::dense() const {
  Eigen::Index m = 0;
  for (const auto& blk : blocks) m += blk.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  Eigen::Index at = 0;
  for (const auto& blk : blocks) {
    out.block(at, at, blk.rows(), blk.cols()) = blk;
    at += blk.rows();
  }
  return out;
}

ScatteringMatrix admittance_to_scattering(const AdmittanceMatrix& b) {
  const double z0 = b.reference_impedance;
  ScatteringMatrix out;
  out.blocks.reserve(b.blocks.size());
  for (const Eigen::MatrixXd& blk : b.blocks) {
    if (blk.rows() == 1) {
      const cplx zb = kJ * z0 * blk(0, 0);
      out.blocks.push_back(Eigen::MatrixXcd::Constant(1, 1, (1.0 - zb) / (1.0 + zb)));
      continue;
    }
    // B_g = V diag(d) V^T, so Theta_g = V diag((1 - j Z0 d) / (1 + j Z0 d)) V^T.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk);
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    Eigen::VectorXcd phase(blk.rows());
    for (Eigen::Index i = 0; i < blk.rows(); ++i) {
      const cplx zd = kJ * z0 * es.eigenvalues()(i);
      phase(i) = (1.0 - zd) / (1.0 + zd);
    }
    Eigen::MatrixXcd theta = v * phase.asDiagonal() * v.transpose();
    theta = (0.5 * (theta + theta.transpose())).eval();
    out.blocks.push_back(std::move(theta));
  }
  return out;
}

double ScatteringReport::max_violation() const {
  return std::max({unitarity, symmetry, block_leak});
}

ScatteringReport validate_scattering(const Eigen::MatrixXcd& theta, const RisArchitecture& arch,
                                     const ScatteringTolerance& tol) {
  ScatteringReport r;
  if (theta.rows() != arch.total() || theta.cols() != arch.total()) {
    r.unitarity = r.symmetry = r.block_leak = std::numeric_limits<double>::infinity();
    return r;
  }
  const auto m = theta.rows();
  r.unitarity = (theta.adjoint() * theta - Eigen::MatrixXcd::Identity(m, m)).norm();
  r.symmetry = (theta - theta.transpose()).norm();
  Eigen::MatrixXcd off = theta;
  const int ne = arch.group_size();
  for (int g = 0; g < arch.num_groups(); ++g) off.block(g * ne, g * ne, ne, ne).setZero();
  r.block_leak = off.norm();
  r.pass = r.unitarity <= tol.unitarity && r.symmetry <= tol.symmetry &&
           r.block_leak <= tol.block_leak;
  return r;
}

Eigen::VectorXd pack_upper(const AdmittanceMatrix& b) {
  Eigen::Index n = 0;
  for (const auto& blk : b.blocks) {
    if (blk.rows() != blk.cols() || blk != blk.transpose()) {
      throw std::invalid_argument("pack_upper: admittance block is not symmetric");
    }
    n += blk.rows() * (blk.rows() + 1) / 2;
  }
  Eigen::VectorXd x(n);
  Eigen::Index at = 0;
  for (const auto& blk : b.blocks) {
    for (Eigen::Index i = 0; i < blk.rows(); ++i) {
      for (Eigen::Index j = i; j < blk.cols(); ++j) x(at++) = blk(i, j);
    }
  }
  return x;
}

AdmittanceMatrix unpack_upper(const Eigen::VectorXd& x, const RisArchitecture& arch, double z0) {
  if (x.size() != arch.packed_size()) {
    throw std::invalid_argument("unpack_upper: expected " + std::to_string(arch.packed_size()) +
                                " entries, got " + std::to_string(x.size()));
  }
  AdmittanceMatrix b = AdmittanceMatrix::zero(arch, z0);
  Eigen::Index at = 0;
  for (auto& blk : b.blocks) {
    for (Eigen::Index i = 0; i < blk.rows(); ++i) {
      for (Eigen::Index j = i; j < blk.cols(); ++j) {
        blk(i, j) = x(at);
        blk(j, i) = x(at);
        ++at;
      }
    }
  }
  return b;
}

}  // namespace mabdris
