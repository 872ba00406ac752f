#include "mabdris/fp_solver.hpp"

#include <algorithm>
#include <cmath>

namespace mabdris {

const char* mobility_label(Mobility m) { return m == Mobility::kMovable ? "MA" : "FA"; }

namespace {

template <typename F>
auto run_block(const char* name, F&& f) {
  try {
    return f();
  } catch (const SolverError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverError(name, e.what());
  }
}

void add_flag(std::vector<std::string>& flags, const std::string& f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
}

}  // namespace

OptimizeResult optimize(const Scenario& scenario, const RisArchitecture& arch,
                        const OptimizerConfig& cfg) {
  if (arch.total() != scenario.geometry.num_elements() ||
      arch.group_size() != scenario.geometry.group_size()) {
    throw ConfigError("optimize: architecture disagrees with the geometry");
  }
  if (cfg.transmit_power_w < 0.0) throw ConfigError("optimize: negative transmit power");
  scenario.geometry.validate();

  SystemGeometry geometry = scenario.geometry;
  ChannelSet ch = scenario.channels();
  OptimizeResult out;
  out.B = AdmittanceMatrix::zero(arch, cfg.admm.reference_impedance);
  out.theta = ScatteringMatrix::identity(arch);
  out.refs = geometry.group_refs;
  Eigen::MatrixXcd theta = out.theta.dense();
  out.W = mrt_beamformer(ch, theta, cfg.transmit_power_w);
  double rate = sum_rate(ch, theta, out.W);
  out.trace.push_back(rate);
  if (cfg.transmit_power_w == 0.0) {
    out.converged = true;
    return out;
  }

  AdmmState admm_state;
  auto accept = [&](double candidate) {
    if (std::isfinite(candidate) && candidate >= rate - cfg.accept_slack) {
      rate = candidate;
      out.trace.push_back(rate);
      return true;
    }
    ++out.rejected_blocks;
    out.trace.push_back(rate);
    return false;
  };

  for (int it = 1; it <= cfg.max_outer; ++it) {
    out.outer_iterations = it;
    const double start = rate;

    {
      const FpAuxiliaries aux = update_auxiliaries(ch, theta, out.W);
      const BeamformerSolution sol = run_block("beamformer", [&] {
        return solve_beamformer(build_quadratics(ch, theta, aux), cfg.transmit_power_w,
                                cfg.bisection);
      });
      if (accept(sum_rate(ch, theta, sol.W))) out.W = sol.W;
    }

    {
      const FpAuxiliaries aux = update_auxiliaries(ch, theta, out.W);
      const AdmmResult res =
          run_block("admm", [&] { return run_admm(ch, out.W, aux, arch, cfg.admm, admm_state); });
      out.admm_residual = res.residual;
      if (!res.converged) add_flag(out.flags, "admm_not_converged");
      const Eigen::MatrixXcd cand = res.theta.dense();
      if (accept(sum_rate(ch, cand, out.W))) {
        out.B = res.B;
        out.theta = res.theta;
        theta = cand;
      } else {
        admm_state.B = out.B;
      }
    }

    if (cfg.mobility == Mobility::kMovable) {
      const FpAuxiliaries aux = update_auxiliaries(ch, theta, out.W);
      const PlacementResult pr = run_block("placement", [&] {
        const PlacementProblem prob = prepare_placement(geometry, scenario.env, out.theta, out.W, aux);
        return optimize_positions(prob, geometry, cfg.placement);
      });
      if (pr.infeasible) add_flag(out.flags, "sca_infeasible");
      ChannelSet moved = scenario.channels_at(pr.refs);
      if (accept(sum_rate(moved, theta, out.W))) {
        geometry.group_refs = pr.refs;
        out.refs = pr.refs;
        ch = std::move(moved);
      }
    }

    if (std::abs(rate - start) <= cfg.tol_outer * std::max(std::abs(start), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) add_flag(out.flags, "outer_not_converged");
  out.sum_rate = rate;
  return out;
}

}  // namespace mabdris
