#include "mabdris/admm_scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mabdris {

BSubproblem build_b_subproblem(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& hu,
                               const Eigen::MatrixXcd& lambda, double z0, double penalty) {
  if (u.rows() != hu.rows() || u.cols() != hu.cols() || lambda.rows() != u.rows() ||
      lambda.cols() != u.cols()) {
    throw ConfigError("b-subproblem: U, H_U and Lambda must share dimensions");
  }
  const Eigen::Index k = u.cols();
  const Eigen::MatrixXcd lhs = (kJ * z0) * (u + hu);
  const Eigen::MatrixXcd rhs = u - hu + lambda / penalty;
  BSubproblem sub{Eigen::MatrixXd(u.rows(), 2 * k), Eigen::MatrixXd(u.rows(), 2 * k)};
  sub.M << lhs.real(), lhs.imag();
  sub.Gamma << rhs.real(), rhs.imag();
  return sub;
}

LinearMap assemble_linear_map(const BSubproblem& sub, const RisArchitecture& arch) {
  if (sub.M.rows() != arch.total()) {
    throw ConfigError("linear map: M rows must equal the number of RIS elements");
  }
  const Eigen::Index cols = sub.M.cols();
  const int ne = arch.group_size();
  LinearMap map{Eigen::MatrixXd::Zero(arch.total() * cols, arch.packed_size()),
                Eigen::VectorXd(arch.total() * cols)};
  for (Eigen::Index r = 0; r < sub.Gamma.rows(); ++r) {
    map.b.segment(r * cols, cols) = sub.Gamma.row(r).transpose();
  }
  Eigen::Index idx = 0;
  for (int g = 0; g < arch.num_groups(); ++g) {
    const int o = g * ne;
    for (int a = 0; a < ne; ++a) {
      for (int b = a; b < ne; ++b, ++idx) {
        // x_idx = B(a,b) = B(b,a): feeds row a through M(b,:) and row b through M(a,:).
        for (Eigen::Index c = 0; c < cols; ++c) {
          map.A((o + a) * cols + c, idx) += sub.M(o + b, c);
          if (a != b) map.A((o + b) * cols + c, idx) += sub.M(o + a, c);
        }
      }
    }
  }
  return map;
}

namespace {

// Ridge used when the proximal weight is zero and the normal matrix may be singular.
double ridge_for(double max_diag) { return 1e-12 * std::max(1.0, max_diag); }

double normal_max_diag(const BSubproblem& sub, const RisArchitecture& arch) {
  const Eigen::VectorXd rn = sub.M.rowwise().squaredNorm();
  const int ne = arch.group_size();
  double best = 0.0;
  for (int g = 0; g < arch.num_groups(); ++g) {
    const Eigen::VectorXd seg = rn.segment(g * ne, ne);
    if (ne == 1) {
      best = std::max(best, seg(0));
      continue;
    }
    std::vector<double> v(seg.data(), seg.data() + ne);
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), std::greater<>());
    best = std::max(best, v[0] + v[1]);
  }
  return best;
}

}  // namespace

Eigen::VectorXd b_step(const LinearMap& map, const Eigen::VectorXd& x_prev, double penalty,
                       double proximal) {
  if (!(penalty > 0.0) || proximal < 0.0) {
    throw ConfigError("b_step: need penalty > 0 and proximal >= 0");
  }
  const double eta = proximal / penalty;
  Eigen::MatrixXd normal = map.A.transpose() * map.A;
  double diag = eta;
  if (proximal == 0.0) diag = ridge_for(normal.diagonal().maxCoeff());
  normal.diagonal().array() += diag;
  const Eigen::VectorXd rhs = map.A.transpose() * map.b + eta * x_prev;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) return normal.ldlt().solve(rhs);
  return llt.solve(rhs);
}

Eigen::VectorXd b_step_blocked(const BSubproblem& sub, const RisArchitecture& arch,
                               const Eigen::VectorXd& x_prev, double penalty, double proximal) {
  if (!(penalty > 0.0) || proximal < 0.0) {
    throw ConfigError("b_step: need penalty > 0 and proximal >= 0");
  }
  if (x_prev.size() != arch.packed_size() || sub.M.rows() != arch.total()) {
    throw ConfigError("b_step: dimension mismatch");
  }
  const double eta = proximal / penalty;
  const double eta_sys = proximal == 0.0 ? ridge_for(normal_max_diag(sub, arch)) : eta;
  const int ne = arch.group_size();
  const AdmittanceMatrix prev = unpack_upper(x_prev, arch);

  // Per group the normal equations read
  //   sym(B P) + (eta'/2) B + (eta'/2) Diag(B) = sym(Gamma M^T) + (eta/2)(B0 + Diag(B0)),
  // with P = M M^T. The Lyapunov part is diagonal in the eigenbasis of P; the
  // Diag(B) term is handled through an N_E x N_E Schur system for diag(B).
  AdmittanceMatrix out = AdmittanceMatrix::zero(arch);
  for (int g = 0; g < arch.num_groups(); ++g) {
    const Eigen::MatrixXd mg = sub.M.middleRows(g * ne, ne);
    const Eigen::MatrixXd gg = sub.Gamma.middleRows(g * ne, ne);
    const Eigen::MatrixXd& b0 = prev.blocks[g];
    const Eigen::MatrixXd p = mg * mg.transpose();
    const Eigen::MatrixXd s = gg * mg.transpose();
    if (ne == 1) {
      out.blocks[g](0, 0) = (s(0, 0) + eta * b0(0, 0)) / (p(0, 0) + eta_sys);
      continue;
    }
    Eigen::MatrixXd rhs = 0.5 * (s + s.transpose()) + 0.5 * eta * b0;
    rhs.diagonal() += 0.5 * eta * b0.diagonal();

    // P has rank <= 2K. With U an orthonormal basis of range(M_g) that diagonalizes P
    // (P = U diag(d) U^T), L(X) = sym(XP) + (eta'/2) X inverts as
    //   (2/eta') Y + U (R .* U^T Y U) U^T + U diag(r) U^T Y (I - UU^T) + transpose,
    // where r_i = 2/(d_i + eta') - 2/eta' and R_ij = 2/(d_i + d_j + eta') - 2/eta'.
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(mg);
    const Eigen::Index rank = std::min<Eigen::Index>(ne, mg.cols());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ne, rank);
    const Eigen::MatrixXd qm = q.transpose() * mg;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qm * qm.transpose());
    const Eigen::MatrixXd u = q * es.eigenvectors();
    const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    const double inv_eta = 2.0 / eta_sys;
    const Eigen::VectorXd r = (2.0 / (d.array() + eta_sys) - inv_eta).matrix();
    Eigen::MatrixXd rr(rank, rank);
    for (Eigen::Index i = 0; i < rank; ++i) {
      for (Eigen::Index j = 0; j < rank; ++j) rr(i, j) = 2.0 / (d(i) + d(j) + eta_sys) - inv_eta;
    }
    auto lyap_inv = [&](const Eigen::MatrixXd& y) -> Eigen::MatrixXd {
      const Eigen::MatrixXd uy = u.transpose() * y;  // rank x ne
      const Eigen::MatrixXd uyu = uy * u;
      const Eigen::MatrixXd cross = r.asDiagonal() * (uy - uyu * u.transpose());
      const Eigen::MatrixXd cu = u * cross;
      return inv_eta * y + u * rr.cwiseProduct(uyu) * u.transpose() + cu + cu.transpose();
    };

    // schur(a, b) = delta_ab + (eta'/2) [L^-1(e_a e_a^T)]_bb
    const Eigen::MatrixXd a1 = u * r.asDiagonal() * u.transpose();
    const Eigen::MatrixXd a2 = u * u.transpose();
    Eigen::MatrixXd t = inv_eta * Eigen::MatrixXd::Identity(ne, ne) +
                        2.0 * a1.cwiseProduct(Eigen::MatrixXd::Identity(ne, ne) - a2);
    for (int a = 0; a < ne; ++a) {
      for (int b = a; b < ne; ++b) {
        const Eigen::VectorXd w = u.row(a).cwiseProduct(u.row(b)).transpose();
        const double v = w.dot(rr * w);
        t(a, b) += v;
        if (a != b) t(b, a) += v;
      }
    }
    const Eigen::MatrixXd schur = Eigen::MatrixXd::Identity(ne, ne) + 0.5 * eta_sys * t;
    const Eigen::MatrixXd base = lyap_inv(rhs);
    const Eigen::VectorXd diag = schur.ldlt().solve(base.diagonal());
    Eigen::MatrixXd blk = base - 0.5 * eta_sys * lyap_inv(diag.asDiagonal().toDenseMatrix());
    out.blocks[g] = 0.5 * (blk + blk.transpose());
  }
  return pack_upper(out);
}

namespace {

// (I + coeff * B) X with coeff = +/- j Z0.
Eigen::MatrixXcd shift_by_admittance(const Eigen::MatrixXd& b_dense, const Eigen::MatrixXcd& x,
                                     cplx coeff) {
  return x + coeff * (b_dense.cast<cplx>() * x);
}

}  // namespace

Eigen::MatrixXcd u_step(const AdmittanceMatrix& b, const Eigen::MatrixXcd& hw,
                        const Eigen::MatrixXcd& hu, const FpAuxiliaries& aux,
                        const Eigen::MatrixXcd& lambda, double penalty) {
  const double z0 = b.reference_impedance;
  const Eigen::MatrixXd bd = b.dense();
  const Eigen::Index m = bd.rows();
  if (hw.rows() != m || hu.rows() != m || lambda.rows() != m) {
    throw ConfigError("u_step: dimension mismatch");
  }
  // (rho/2)(I + Z0^2 B^2) is shared by every user.
  Eigen::MatrixXcd base = (0.5 * penalty) * (Eigen::MatrixXd::Identity(m, m) + z0 * z0 * bd * bd)
                                                .cast<cplx>();
  const Eigen::MatrixXcd hwwh = hw * hw.adjoint();
  const Eigen::MatrixXcd xh_hu = shift_by_admittance(bd, hu, kJ * z0);
  const Eigen::MatrixXcd xh2_hu = shift_by_admittance(bd, xh_hu, kJ * z0);
  const Eigen::MatrixXcd xh_lambda = shift_by_admittance(bd, lambda, kJ * z0);

  Eigen::MatrixXcd u(m, hu.cols());
  for (Eigen::Index k = 0; k < hu.cols(); ++k) {
    Eigen::MatrixXcd sys = base + std::norm(aux.psi(k)) * hwwh;
    const Eigen::VectorXcd rhs = std::sqrt(1.0 + aux.rho(k)) * std::conj(aux.psi(k)) * hw.col(k) +
                                 0.5 * (penalty * xh2_hu.col(k) - xh_lambda.col(k));
    Eigen::LLT<Eigen::MatrixXcd> llt(sys);
    if (llt.info() != Eigen::Success) {
      throw SolverError("admm", "u-step system is not positive definite");
    }
    u.col(k) = llt.solve(rhs);
  }
  return u;
}

Eigen::MatrixXcd constraint_residual(const AdmittanceMatrix& b, const Eigen::MatrixXcd& u,
                                     const Eigen::MatrixXcd& hu) {
  const Eigen::MatrixXd bd = b.dense();
  const double z0 = b.reference_impedance;
  return shift_by_admittance(bd, u, -kJ * z0) - shift_by_admittance(bd, hu, kJ * z0);
}

Eigen::MatrixXcd dual_step(const AdmittanceMatrix& b, const Eigen::MatrixXcd& u,
                           const Eigen::MatrixXcd& hu, const Eigen::MatrixXcd& lambda,
                           double penalty) {
  return lambda + penalty * constraint_residual(b, u, hu);
}

AdmmResult run_admm(const ChannelSet& ch, const Eigen::MatrixXcd& w, const FpAuxiliaries& aux,
                    const RisArchitecture& arch, const AdmmConfig& cfg, AdmmState& state) {
  if (!(cfg.penalty > 0.0) || cfg.proximal < 0.0) {
    throw ConfigError("admm: need penalty > 0 and proximal >= 0");
  }
  if (ch.num_elements() != arch.total()) throw ConfigError("admm: architecture/channel mismatch");
  const Eigen::Index m = arch.total();
  const Eigen::Index k_count = ch.num_users();

  double scale = 1.0;
  if (cfg.normalize_channels) {
    const double rms = ch.ris_ue.norm() / std::sqrt(static_cast<double>(m * k_count));
    if (rms > 0.0 && std::isfinite(rms)) scale = rms;
  }
  const Eigen::MatrixXcd hu = ch.ris_ue / scale;
  const Eigen::MatrixXcd hw = ch.bs_ris * w;
  // Rescaling h_k by 1/s is absorbed exactly by psi_k -> s psi_k.
  const FpAuxiliaries aux_n{aux.rho, aux.psi * scale};

  AdmittanceMatrix b = AdmittanceMatrix::zero(arch, cfg.reference_impedance);
  Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Zero(m, k_count);
  if (state.initialized && state.B.architecture() == arch && state.lambda.rows() == m &&
      state.lambda.cols() == k_count) {
    b = state.B;
    b.reference_impedance = cfg.reference_impedance;
    lambda = state.lambda * (scale / state.scale);
  }
  ScatteringMatrix theta = admittance_to_scattering(b);
  Eigen::MatrixXcd theta_dense = theta.dense();
  // Start from the point that satisfies the coupling constraint for the warm B.
  Eigen::MatrixXcd u = theta_dense.conjugate() * hu;

  auto true_objective = [&](const Eigen::MatrixXcd& th) {
    return fp_block_objective(effective_gains(ch, th, w), aux);
  };

  AdmmResult best;
  best.B = b;
  best.theta = theta;
  double best_obj = true_objective(theta_dense);

  AdmmResult res;
  Eigen::VectorXd x = pack_upper(b);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const BSubproblem sub = build_b_subproblem(u, hu, lambda, cfg.reference_impedance, cfg.penalty);
    x = b_step_blocked(sub, arch, x, cfg.penalty, cfg.proximal);
    b = unpack_upper(x, arch, cfg.reference_impedance);
    u = u_step(b, hw, hu, aux_n, lambda, cfg.penalty);
    const Eigen::MatrixXcd r = constraint_residual(b, u, hu);
    lambda += cfg.penalty * r;
    res.residual = r.norm();
    res.residual_trace.push_back(res.residual);
    res.iterations = it;
    if (!std::isfinite(res.residual)) break;

    theta = admittance_to_scattering(b);
    theta_dense = theta.dense();
    const double obj = true_objective(theta_dense);
    if (obj > best_obj) {
      best_obj = obj;
      best.B = b;
      best.theta = theta;
    }
    if (res.residual < cfg.tolerance) {
      res.converged = true;
      break;
    }
  }

  if (res.converged) {
    res.B = b;
    res.theta = theta;
  } else {
    res.B = best.B;
    res.theta = best.theta;
  }
  if (std::isfinite(res.residual)) {
    state.B = res.B;
    state.lambda = lambda;
    state.scale = scale;
    state.initialized = true;
  } else {
    state = AdmmState{};
  }
  return res;
}

}  // namespace mabdris
