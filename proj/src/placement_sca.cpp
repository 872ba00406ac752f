#include "mabdris/placement_sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mabdris {

namespace {

Eigen::VectorXcd phase_vector(const Eigen::MatrixX2d& proj, const Vec2& c, double k0) {
  Eigen::VectorXcd out(proj.rows());
  for (Eigen::Index p = 0; p < proj.rows(); ++p) out(p) = std::polar(1.0, k0 * proj.row(p).dot(c));
  return out;
}

// N_E x L matrix with entry (m, p) = exp(j k0 proj_p . offset_m).
Eigen::MatrixXcd offset_phases(const Eigen::MatrixX2d& proj, std::span<const Vec2> offsets,
                               double k0) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(offsets.size()), proj.rows());
  for (std::size_t m = 0; m < offsets.size(); ++m) {
    out.row(static_cast<Eigen::Index>(m)) = phase_vector(proj, offsets[m], k0).transpose();
  }
  return out;
}

}  // namespace

cplx PlacementProblem::group_response(int g, int k, int kp, const Vec2& c) const {
  const double k0 = 2.0 * kPi / wavelength;
  const Eigen::VectorXcd f = phase_vector(rx_proj, c, k0);
  const Eigen::VectorXcd gk = phase_vector(tx_proj[k], c, k0);
  return f.dot(this->c(g, k, kp) * gk);
}

PlacementProblem prepare_placement(const SystemGeometry& geometry, const PathEnvironment& env,
                                   const ScatteringMatrix& theta, const Eigen::MatrixXcd& w,
                                   const FpAuxiliaries& aux) {
  const int k_count = env.num_users();
  if (w.cols() != k_count || aux.psi.size() != k_count || aux.rho.size() != k_count) {
    throw ConfigError("placement: beamformer/auxiliary sizes disagree with the UE count");
  }
  if (static_cast<int>(theta.blocks.size()) != geometry.num_groups()) {
    throw ConfigError("placement: scattering blocks disagree with the group count");
  }
  const double k0 = 2.0 * kPi / geometry.wavelength;
  PlacementProblem prob;
  prob.num_groups = geometry.num_groups();
  prob.num_users = k_count;
  prob.wavelength = geometry.wavelength;
  prob.rx_angles = env.ris_arrival;
  prob.tx_angles = env.ue_departure;
  prob.rx_proj = env.ris_arrival.projections();
  for (const PathAngles& a : env.ue_departure) prob.tx_proj.push_back(a.projections());
  prob.rho = aux.rho;

  // Sigma_br G(b) w_k' (L_r) and 1^H Sigma_k (L_t, as a row).
  const Eigen::MatrixXcd sgw =
      env.prm_bs_ris * frm(geometry.bs_positions, env.bs_departure, geometry.wavelength) * w;
  std::vector<Eigen::RowVectorXcd> ones_sigma;
  for (int k = 0; k < k_count; ++k) {
    ones_sigma.push_back(Eigen::RowVectorXcd::Ones(env.prm_ris_ue[k].rows()) * env.prm_ris_ue[k]);
  }

  const Eigen::MatrixXcd alpha = offset_phases(prob.rx_proj, geometry.intra_group_offsets, k0);
  std::vector<Eigen::MatrixXcd> beta;
  for (int k = 0; k < k_count; ++k) {
    beta.push_back(offset_phases(prob.tx_proj[k], geometry.intra_group_offsets, k0));
  }

  prob.base.resize(prob.num_groups);
  for (int g = 0; g < prob.num_groups; ++g) {
    const Eigen::MatrixXcd theta_t = theta.blocks[g].transpose();
    prob.base[g].reserve(k_count * k_count);
    for (int k = 0; k < k_count; ++k) {
      // Block sum of A^H (Theta^T kron X) B collapses to X .* (alpha^H Theta^T beta_k).
      const Eigen::MatrixXcd phi = alpha.adjoint() * theta_t * beta[k];
      for (int kp = 0; kp < k_count; ++kp) {
        const Eigen::MatrixXcd x = std::conj(aux.psi(k)) * (sgw.col(kp) * ones_sigma[k]);
        prob.base[g].push_back(x.cwiseProduct(phi));
      }
    }
  }
  return prob;
}

namespace {

PlacementCoefficients coefficients_with(const PlacementProblem& prob, int group,
                                        const Eigen::MatrixXcd& a) {
  const int k_count = prob.num_users;
  PlacementCoefficients co;
  co.group = group;
  co.num_users = k_count;
  co.wavelength = prob.wavelength;
  co.rx_proj = prob.rx_proj;
  co.tx_proj = prob.tx_proj;
  co.a = a;
  co.C = prob.base[group];
  for (int k = 0; k < k_count; ++k) {
    Eigen::MatrixXcd d = std::sqrt(1.0 + prob.rho(k)) * co.c(k, k);
    Eigen::MatrixXcd e = d;
    for (int kp = 0; kp < k_count; ++kp) e -= a(k, kp) * co.c(k, kp);
    co.D.push_back(std::move(d));
    co.E.push_back(std::move(e));
  }
  return co;
}

Eigen::MatrixXcd group_responses(const PlacementProblem& prob, int g, const Vec2& c) {
  const int k_count = prob.num_users;
  Eigen::MatrixXcd s(k_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    for (int kp = 0; kp < k_count; ++kp) s(k, kp) = prob.group_response(g, k, kp, c);
  }
  return s;
}

}  // namespace

PlacementCoefficients build_coefficients(const PlacementProblem& prob, std::span<const Vec2> refs,
                                         int group) {
  if (static_cast<int>(refs.size()) != prob.num_groups || group < 0 || group >= prob.num_groups) {
    throw ConfigError("placement: reference points disagree with the group count");
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(prob.num_users, prob.num_users);
  for (int i = 0; i < prob.num_groups; ++i) {
    if (i != group) a += group_responses(prob, i, refs[i]).conjugate();
  }
  return coefficients_with(prob, group, a);
}

double mu(const PlacementCoefficients& co, const Vec2& c) {
  const double k0 = 2.0 * kPi / co.wavelength;
  const Eigen::VectorXcd f = phase_vector(co.rx_proj, c, k0);
  double val = 0.0;
  for (int k = 0; k < co.num_users; ++k) {
    const Eigen::VectorXcd gk = phase_vector(co.tx_proj[k], c, k0);
    for (int kp = 0; kp < co.num_users; ++kp) val -= std::norm(f.dot(co.c(k, kp) * gk));
    val += 2.0 * std::real(f.dot(co.E[k] * gk));
  }
  return val;
}

Vec2 gradient_mu(const PlacementCoefficients& co, const Vec2& c) {
  const double k0 = 2.0 * kPi / co.wavelength;
  const Eigen::VectorXcd f = phase_vector(co.rx_proj, c, k0);
  Vec2 grad = Vec2::Zero();
  for (int dir = 0; dir < 2; ++dir) {
    const Eigen::VectorXcd df = co.rx_proj.col(dir).cast<cplx>().cwiseProduct(f);
    for (int k = 0; k < co.num_users; ++k) {
      const Eigen::VectorXcd gk = phase_vector(co.tx_proj[k], c, k0);
      const Eigen::VectorXcd dg = co.tx_proj[k].col(dir).cast<cplx>().cwiseProduct(gk);
      // d/dc [f^H X g] = j k0 (f^H X (t .* g) - (r .* f)^H X g)
      auto deriv = [&](const Eigen::MatrixXcd& x) {
        return kJ * k0 * (f.dot(x * dg) - df.dot(x * gk));
      };
      for (int kp = 0; kp < co.num_users; ++kp) {
        const Eigen::MatrixXcd& ckk = co.c(k, kp);
        const cplx s = f.dot(ckk * gk);
        grad(dir) -= 2.0 * std::real(std::conj(s) * deriv(ckk));
      }
      grad(dir) += 2.0 * std::real(deriv(co.E[k]));
    }
  }
  return grad;
}

double curvature_bound_frobenius(const PlacementCoefficients& co) {
  double sum = 0.0;
  for (const Eigen::MatrixXcd& cm : co.C) {
    const double s = cm.cwiseAbs().sum();
    sum += s * s;
  }
  for (const Eigen::MatrixXcd& em : co.E) sum += 2.0 * em.cwiseAbs().sum();
  return 8.0 * kPi * kPi / (co.wavelength * co.wavelength) * sum;
}

double curvature_bound_exact_terms(const PlacementCoefficients& co) {
  const double k0 = 2.0 * kPi / co.wavelength;
  double bound = 0.0;
  for (int k = 0; k < co.num_users; ++k) {
    const Eigen::MatrixX2d& tx = co.tx_proj[k];
    // Phase gradient of term (i, j): k0 (t_j - r_i).
    auto term_grad = [&](Eigen::Index i, Eigen::Index j) -> Vec2 {
      return k0 * (tx.row(j) - co.rx_proj.row(i)).transpose();
    };
    for (int kp = 0; kp < co.num_users; ++kp) {
      const Eigen::MatrixXcd& cm = co.c(k, kp);
      // sum_{ij,qp} w_ij w_qp ||v_ij - v_qp||^2 = 2 W sum w ||v||^2 - 2 ||sum w v||^2
      double w_sum = 0.0;
      double wv2 = 0.0;
      Vec2 wv = Vec2::Zero();
      for (Eigen::Index i = 0; i < cm.rows(); ++i) {
        for (Eigen::Index j = 0; j < cm.cols(); ++j) {
          const double wt = std::abs(cm(i, j));
          const Vec2 v = term_grad(i, j);
          w_sum += wt;
          wv2 += wt * v.squaredNorm();
          wv += wt * v;
        }
      }
      bound += std::max(0.0, 2.0 * w_sum * wv2 - 2.0 * wv.squaredNorm());
    }
    const Eigen::MatrixXcd& em = co.E[k];
    for (Eigen::Index i = 0; i < em.rows(); ++i) {
      for (Eigen::Index j = 0; j < em.cols(); ++j) {
        bound += 2.0 * std::abs(em(i, j)) * term_grad(i, j).squaredNorm();
      }
    }
  }
  return bound;
}

double curvature_bound(const PlacementCoefficients& co) {
  return std::max(curvature_bound_frobenius(co), curvature_bound_exact_terms(co));
}

SurrogateModel build_surrogate(const PlacementCoefficients& co, const Vec2& expansion_point) {
  SurrogateModel s;
  s.expansion_point = expansion_point;
  s.gradient = gradient_mu(co, expansion_point);
  s.curvature = curvature_bound(co);
  s.value = mu(co, expansion_point);
  return s;
}

std::optional<Vec2> project_onto_halfplanes(const Vec2& target, std::span<const HalfPlane> planes,
                                            double tol) {
  auto feasible = [&](const Vec2& c) {
    for (const HalfPlane& h : planes) {
      const double scale = std::max(1.0, std::abs(h.offset)) * std::max(1.0, h.normal.norm());
      if (h.normal.dot(c) < h.offset - tol * scale) return false;
    }
    return true;
  };
  if (feasible(target)) return target;

  struct Candidate {
    double dist2;
    Vec2 point;
  };
  std::vector<Candidate> cands;
  for (const HalfPlane& h : planes) {
    const double nn = h.normal.squaredNorm();
    if (nn == 0.0) continue;
    const Vec2 p = target + (h.offset - h.normal.dot(target)) / nn * h.normal;
    cands.push_back({(p - target).squaredNorm(), p});
  }
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      Eigen::Matrix2d a;
      a.row(0) = planes[i].normal.transpose();
      a.row(1) = planes[j].normal.transpose();
      const double det = a.determinant();
      if (std::abs(det) <= 1e-14 * planes[i].normal.norm() * planes[j].normal.norm()) continue;
      const Vec2 p = a.inverse() * Vec2(planes[i].offset, planes[j].offset);
      cands.push_back({(p - target).squaredNorm(), p});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& l, const Candidate& r) { return l.dist2 < r.dist2; });
  for (const Candidate& c : cands) {
    if (feasible(c.point)) return c.point;
  }
  return std::nullopt;
}

std::vector<HalfPlane> placement_constraints(const SystemGeometry& geometry, int group,
                                             const Vec2& current) {
  const Rect box = geometry.reference_box();
  std::vector<HalfPlane> planes{
      {Vec2(1.0, 0.0), box.lo.x()},
      {Vec2(-1.0, 0.0), -box.hi.x()},
      {Vec2(0.0, 1.0), box.lo.y()},
      {Vec2(0.0, -1.0), -box.hi.y()},
  };
  if (geometry.min_spacing <= 0.0) return planes;
  for (int h = 0; h < geometry.num_groups(); ++h) {
    if (h == group) continue;
    const Vec2 diff = current - geometry.group_refs[h];
    const double n = diff.norm();
    if (n == 0.0) continue;
    const Vec2 u = diff / n;
    planes.push_back({u, geometry.min_spacing + u.dot(geometry.group_refs[h])});
  }
  return planes;
}

ScaStep sca_group_step(const PlacementCoefficients& co, const SystemGeometry& geometry,
                       int group) {
  const Vec2 current = geometry.group_refs.at(group);
  ScaStep step;
  step.surrogate = build_surrogate(co, current);
  step.next = current;
  const SurrogateModel& s = step.surrogate;
  if (s.gradient.squaredNorm() == 0.0 || !(s.curvature > 0.0)) return step;

  // argmax of the concave surrogate without constraints.
  const Vec2 target = current + s.gradient / s.curvature;
  const double radius = (target - current).norm();
  std::vector<HalfPlane> planes;
  for (const HalfPlane& h : placement_constraints(geometry, group, current)) {
    // A plane whose boundary is farther than `radius` from the target cannot be active.
    if ((h.normal.dot(target) - h.offset) / h.normal.norm() <= radius * (1.0 + 1e-9)) {
      planes.push_back(h);
    }
  }
  const std::optional<Vec2> next = project_onto_halfplanes(target, planes);
  if (!next) {
    step.infeasible = true;
    return step;
  }
  step.next = *next;
  return step;
}

PlacementResult optimize_positions(const PlacementProblem& prob, const SystemGeometry& geometry,
                                   const PlacementConfig& cfg) {
  SystemGeometry geo = geometry;
  PlacementResult out;
  const int ng = geo.num_groups();
  std::vector<Eigen::MatrixXcd> resp(ng);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(prob.num_users, prob.num_users);
  for (int g = 0; g < ng; ++g) {
    resp[g] = group_responses(prob, g, geo.group_refs[g]).conjugate();
    total += resp[g];
  }
  const double tol = cfg.tol_position_wavelengths * geo.wavelength;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    out.sweeps = sweep;
    double max_move = 0.0;
    for (int g = 0; g < ng; ++g) {
      const PlacementCoefficients co = coefficients_with(prob, g, total - resp[g]);
      const ScaStep step = sca_group_step(co, geo, g);
      if (step.infeasible) {
        out.infeasible = true;
        continue;
      }
      if (step.next == geo.group_refs[g]) continue;
      if (mu(co, step.next) < step.surrogate.value) {
        ++out.rejected_steps;
        continue;
      }
      max_move = std::max(max_move, (step.next - geo.group_refs[g]).norm());
      geo.group_refs[g] = step.next;
      total -= resp[g];
      resp[g] = group_responses(prob, g, step.next).conjugate();
      total += resp[g];
    }
    if (max_move < tol) {
      out.converged = true;
      break;
    }
  }
  out.refs = geo.group_refs;
  return out;
}

}  // namespace mabdris
