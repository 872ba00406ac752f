#include "mabdris/beamforming.hpp"

#include <cmath>

namespace mabdris {

BeamformerQuadratics build_quadratics(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                      const FpAuxiliaries& aux) {
  // Row k of `eff` is h_k^H Theta H; its adjoint is the effective channel a_k.
  const Eigen::MatrixXcd eff = ch.ris_ue.adjoint() * theta * ch.bs_ris;
  const Eigen::Index nt = eff.cols();
  const Eigen::Index k_count = eff.rows();
  BeamformerQuadratics quad{Eigen::MatrixXcd::Zero(nt, nt), Eigen::MatrixXcd(nt, k_count)};
  for (Eigen::Index i = 0; i < k_count; ++i) {
    const Eigen::VectorXcd a = eff.row(i).adjoint();
    quad.Q.noalias() += std::norm(aux.psi(i)) * (a * a.adjoint());
    quad.q.col(i) = std::sqrt(1.0 + aux.rho(i)) * aux.psi(i) * a;
  }
  quad.Q = (0.5 * (quad.Q + quad.Q.adjoint())).eval();
  return quad;
}

namespace {

struct Spectral {
  Eigen::VectorXd d;   // clamped eigenvalues of Q
  Eigen::MatrixXcd v;  // eigenvectors
  Eigen::MatrixXd z2;  // |V^H q|^2 summed over users, per eigen-direction (column vector)
  Eigen::MatrixXcd z;  // V^H q
};

Spectral decompose(const BeamformerQuadratics& quad) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(quad.Q);
  Spectral s;
  s.d = es.eigenvalues().cwiseMax(0.0);
  s.v = es.eigenvectors();
  s.z = s.v.adjoint() * quad.q;
  s.z2 = s.z.cwiseAbs2().rowwise().sum();
  return s;
}

double power_at(const Spectral& s, double lambda) {
  double p = 0.0;
  for (Eigen::Index i = 0; i < s.d.size(); ++i) {
    const double den = s.d(i) + lambda;
    p += s.z2(i) / (den * den);
  }
  return p;
}

Eigen::MatrixXcd w_at(const Spectral& s, double lambda) {
  const Eigen::VectorXd inv = (s.d.array() + lambda).inverse().matrix();
  return s.v * (inv.asDiagonal() * s.z);
}

}  // namespace

double beamformer_power(const BeamformerQuadratics& quad, double lambda) {
  return power_at(decompose(quad), lambda);
}

Eigen::MatrixXcd beamformer_at(const BeamformerQuadratics& quad, double lambda) {
  return w_at(decompose(quad), lambda);
}

double beamformer_cost(const BeamformerQuadratics& quad, const Eigen::MatrixXcd& w) {
  double cost = 0.0;
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    cost += std::real(w.col(k).dot(quad.Q * w.col(k)));
    cost -= 2.0 * std::real(w.col(k).dot(quad.q.col(k)));
  }
  return cost;
}

BeamformerSolution solve_beamformer(const BeamformerQuadratics& quad, double power_budget,
                                    const BisectionConfig& cfg) {
  const Eigen::Index nt = quad.Q.rows();
  BeamformerSolution sol;
  sol.W = Eigen::MatrixXcd::Zero(nt, quad.q.cols());
  if (power_budget <= 0.0 || quad.q.squaredNorm() == 0.0) return sol;

  const Spectral s = decompose(quad);
  // Q is rank-deficient whenever K < N_t; a tiny floor keeps (Q + lambda I) invertible.
  const double lambda_min = 1e-12 * (1.0 + std::real(quad.Q.trace()) / static_cast<double>(nt));
  double lo = (s.d.minCoeff() <= lambda_min) ? lambda_min : 0.0;

  if (power_at(s, lo) <= power_budget) {
    sol.multiplier = lo;
    sol.W = w_at(s, lo);
    sol.power = sol.W.squaredNorm();
    return sol;
  }

  double hi = 1.0;
  double p_hi = power_at(s, hi);
  for (int i = 0; p_hi > power_budget && i < 2000; ++i) {
    lo = hi;
    hi *= 2.0;
    p_hi = power_at(s, hi);
  }
  if (p_hi > power_budget) throw SolverError("beamformer", "bisection bracket not found");

  int steps = 0;
  auto done = [&] {
    const double gap = (power_budget - p_hi) / power_budget;
    return gap <= cfg.power_rtol && hi * gap <= cfg.slackness_tol;
  };
  while (steps < cfg.max_halvings && !done()) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double p_mid = power_at(s, mid);
    if (p_mid > power_budget) {
      lo = mid;
    } else {
      hi = mid;
      p_hi = p_mid;
    }
    ++steps;
  }
  sol.multiplier = hi;
  sol.W = w_at(s, hi);
  sol.power = sol.W.squaredNorm();
  sol.halvings = steps;
  return sol;
}

Eigen::MatrixXcd mrt_beamformer(const ChannelSet& ch, const Eigen::MatrixXcd& theta,
                                double power_budget) {
  Eigen::MatrixXcd w = (ch.ris_ue.adjoint() * theta * ch.bs_ris).adjoint();
  const double n = w.norm();
  if (n == 0.0 || power_budget <= 0.0) return Eigen::MatrixXcd::Zero(w.rows(), w.cols());
  return w * (std::sqrt(power_budget) / n);
}

}  // namespace mabdris
