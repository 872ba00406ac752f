#include "mabdris/fp_metrics.hpp"

#include <cmath>

namespace mabdris {

Eigen::MatrixXcd effective_gains(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                 const Eigen::MatrixXcd& w) {
  if (theta.rows() != ch.num_elements() || theta.cols() != ch.num_elements() ||
      w.rows() != ch.num_bs_antennas()) {
    throw ConfigError("effective_gains: dimension mismatch");
  }
  // (h_k^H Theta H w_i)_{k,i} = H_U^H Theta (H W)
  return ch.ris_ue.adjoint() * (theta * (ch.bs_ris * w));
}

double sinr(const ChannelSet& ch, const Eigen::MatrixXcd& theta, const Eigen::MatrixXcd& w,
            int k) {
  const Eigen::MatrixXcd a = effective_gains(ch, theta, w);
  const double signal = std::norm(a(k, k));
  const double interference = a.row(k).cwiseAbs2().sum() - signal;
  return signal / (interference + ch.noise_power);
}

double sum_rate_from_gains(const Eigen::MatrixXcd& a, double noise_power) {
  double rate = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const double signal = std::norm(a(k, k));
    const double interference = a.row(k).cwiseAbs2().sum() - signal;
    rate += std::log2(1.0 + signal / (interference + noise_power));
  }
  return rate;
}

double sum_rate(const ChannelSet& ch, const Eigen::MatrixXcd& theta, const Eigen::MatrixXcd& w) {
  return sum_rate_from_gains(effective_gains(ch, theta, w), ch.noise_power);
}

FpAuxiliaries auxiliaries_from_gains(const Eigen::MatrixXcd& a, double noise_power) {
  const Eigen::Index k_count = a.rows();
  FpAuxiliaries aux{Eigen::VectorXd(k_count), Eigen::VectorXcd(k_count)};
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double total = a.row(k).cwiseAbs2().sum() + noise_power;
    const double signal = std::norm(a(k, k));
    aux.rho(k) = signal / (total - signal);
    aux.psi(k) = std::sqrt(1.0 + aux.rho(k)) * a(k, k) / total;
  }
  return aux;
}

FpAuxiliaries update_auxiliaries(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                 const Eigen::MatrixXcd& w) {
  return auxiliaries_from_gains(effective_gains(ch, theta, w), ch.noise_power);
}

double fp_block_objective(const Eigen::MatrixXcd& a, const FpAuxiliaries& aux) {
  double val = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    val += 2.0 * std::sqrt(1.0 + aux.rho(k)) * std::real(a(k, k) * std::conj(aux.psi(k)));
    val -= std::norm(aux.psi(k)) * a.row(k).cwiseAbs2().sum();
  }
  return val;
}

double fp_objective_from_gains(const Eigen::MatrixXcd& a, double noise_power,
                               const FpAuxiliaries& aux) {
  double val = fp_block_objective(a, aux);
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    val += std::log2(1.0 + aux.rho(k)) - aux.rho(k) - std::norm(aux.psi(k)) * noise_power;
  }
  return val;
}

double fp_objective(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                    const Eigen::MatrixXcd& w, const FpAuxiliaries& aux) {
  return fp_objective_from_gains(effective_gains(ch, theta, w), ch.noise_power, aux);
}

}  // namespace mabdris
