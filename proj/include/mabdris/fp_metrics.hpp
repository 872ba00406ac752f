#pragma once

#include "mabdris/channel_model.hpp"

namespace mabdris {

/// Quadratic-transform auxiliaries: rho_k >= 0 and psi_k complex.
struct FpAuxiliaries {
  Eigen::VectorXd rho;
  Eigen::VectorXcd psi;
};

/// K x K matrix with entry (k, i) = h_k^H Theta H w_i.
Eigen::MatrixXcd effective_gains(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                 const Eigen::MatrixXcd& w);

double sinr(const ChannelSet& ch, const Eigen::MatrixXcd& theta, const Eigen::MatrixXcd& w,
            int k);

/// Sum of log2(1 + SINR_k), bits/s/Hz.
double sum_rate(const ChannelSet& ch, const Eigen::MatrixXcd& theta, const Eigen::MatrixXcd& w);
double sum_rate_from_gains(const Eigen::MatrixXcd& gains, double noise_power);

/// Closed-form maximizers of the FP objective in (rho, psi) for fixed W and Theta.
FpAuxiliaries update_auxiliaries(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                 const Eigen::MatrixXcd& w);
FpAuxiliaries auxiliaries_from_gains(const Eigen::MatrixXcd& gains, double noise_power);

/// sum_k log2(1+rho_k) - rho_k + 2 sqrt(1+rho_k) Re{a_kk psi_k^*}
///       - |psi_k|^2 (sum_i |a_ki|^2 + sigma^2),  a = effective_gains.
double fp_objective(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                    const Eigen::MatrixXcd& w, const FpAuxiliaries& aux);
double fp_objective_from_gains(const Eigen::MatrixXcd& gains, double noise_power,
                               const FpAuxiliaries& aux);

/// The part of the FP objective that depends on (W, Theta, c):
/// sum_k 2 sqrt(1+rho_k) Re{a_kk psi_k^*} - |psi_k|^2 sum_i |a_ki|^2.
double fp_block_objective(const Eigen::MatrixXcd& gains, const FpAuxiliaries& aux);

}  // namespace mabdris
