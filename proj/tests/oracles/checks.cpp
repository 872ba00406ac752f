#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <sstream>

#include "mabdris/sim_harness.hpp"
#include "oracles.hpp"

namespace mabdris::check {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string fix(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Vec2 random_point(const Rect& box, Rng& rng) {
  return {rng.uniform(box.lo.x(), box.hi.x()), rng.uniform(box.lo.y(), box.hi.y())};
}

// Random placement scenario with the geometry's groups spread over the box.
struct PlacementCase {
  oracle::RandomInstance inst;
  FpAuxiliaries aux;
  PlacementProblem prob;
  int group = 0;
};

PlacementCase placement_case(std::uint64_t seed) {
  Rng rng(hash_combine({seed, 0xC5u}));
  const int ms[] = {8, 16};
  const int nes[] = {1, 2, 4};
  const int m = ms[rng.engine()() % 2];
  const int ne = nes[rng.engine()() % 3];
  const int l = 3 + static_cast<int>(rng.engine()() % 4);
  const int k = 1 + static_cast<int>(rng.engine()() % 3);
  PlacementCase pc{oracle::random_instance(seed, m, ne, 4, l, k), {}, {}, 0};
  pc.aux = update_auxiliaries(pc.inst.channels, pc.inst.theta.dense(), pc.inst.w);
  pc.prob = prepare_placement(pc.inst.scenario.geometry, pc.inst.scenario.env, pc.inst.theta,
                              pc.inst.w, pc.aux);
  pc.group = static_cast<int>(rng.engine()() % static_cast<std::uint64_t>(m / ne));
  return pc;
}

}  // namespace

std::string format(const CheckResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + "  [" + r.id + "] " + r.title + ": " + r.detail +
         " (" + fix(r.seconds, 1) + " s)";
}

CheckResult scattering_constraints() {
  const auto t0 = Clock::now();
  CheckResult r{"1", "physical constraints of recovered scattering matrices"};
  Rng rng(101);
  const int m = 16;
  double worst_unit = 0.0, worst_sym = 0.0, worst_leak = 0.0;
  for (int n = 0; n < 100; ++n) {
    const int ne = std::vector<int>{1, 2, 4, m}[n % 4];
    const RisArchitecture arch(m / ne, ne);
    const double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
    const AdmittanceMatrix b = oracle::random_admittance(arch, rng, scale);
    const Eigen::MatrixXcd th = admittance_to_scattering(b).dense();
    worst_unit = std::max(worst_unit,
                          (th.adjoint() * th - Eigen::MatrixXcd::Identity(m, m)).norm());
    worst_sym = std::max(worst_sym, (th - th.transpose()).norm());
    Eigen::MatrixXcd off = th;
    for (int g = 0; g < arch.num_groups(); ++g) off.block(g * ne, g * ne, ne, ne).setZero();
    worst_leak = std::max(worst_leak, off.norm());
  }
  r.seconds = seconds_since(t0);
  r.pass = worst_unit <= 1e-8 && worst_sym <= 1e-10 && worst_leak == 0.0 && r.seconds < 10.0;
  r.detail = "max ||T^H T - I||_F = " + sci(worst_unit) + " (<= 1e-8), max ||T - T^T||_F = " +
             sci(worst_sym) + " (<= 1e-10), off-block = " + sci(worst_leak) + ", 100 draws, < 10 s";
  return r;
}

CheckResult fp_identity() {
  const auto t0 = Clock::now();
  CheckResult r{"2", "quadratic-transform objective equals the sum-rate"};
  Rng rng(202);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const int m = std::vector<int>{4, 8, 16}[n % 3];
    const int ne = std::vector<int>{1, 2, 4}[(n / 3) % 3];
    const int k = 1 + n % 3;
    oracle::RandomInstance inst = oracle::random_instance(1000 + n, m, ne, 4, 4, k);
    inst.w = oracle::random_beamformer(4, k, std::pow(10.0, rng.uniform(-4.0, 0.0)), rng);
    const Eigen::MatrixXcd th = inst.theta.dense();
    const FpAuxiliaries aux = update_auxiliaries(inst.channels, th, inst.w);
    const double fp = fp_objective(inst.channels, th, inst.w, aux);
    const Eigen::MatrixXcd g = oracle::gains(
        oracle::bs_ris_channel(inst.scenario.geometry, inst.scenario.env),
        oracle::ris_ue_channels(inst.scenario.geometry, inst.scenario.env), th, inst.w);
    worst = std::max(worst, rel_diff(fp, oracle::sum_rate(g, inst.channels.noise_power)));
  }
  r.seconds = seconds_since(t0);
  r.pass = worst <= 1e-9;
  r.detail = "max relative gap " + sci(worst) + " (<= 1e-9) over 100 instances";
  return r;
}

CheckResult beamformer_kkt() {
  const auto t0 = Clock::now();
  CheckResult r{"3", "beamformer power feasibility, slackness and multiplier"};
  Rng rng(303);
  double worst_feas = 0.0, worst_tight = 0.0, worst_cs = 0.0;
  int bracket_miss = 0, active = 0;
  for (int n = 0; n < 100; ++n) {
    const int k = 1 + n % 3;
    const int nt = std::vector<int>{2, 4, 8}[(n / 3) % 3];
    const oracle::RandomInstance inst = oracle::random_instance(2000 + n, 8, 2, nt, 5, k);
    const Eigen::MatrixXcd th = inst.theta.dense();
    const FpAuxiliaries aux = update_auxiliaries(inst.channels, th, inst.w);
    const BeamformerQuadratics quad = build_quadratics(inst.channels, th, aux);
    const double lmin = 1e-12 * (1.0 + std::real(quad.Q.trace()) / nt);
    const double p_free = oracle::beamformer_power(quad.Q, quad.q, lmin);
    const double budget = p_free * std::pow(10.0, rng.uniform(-3.0, 0.5));
    const BeamformerSolution sol = solve_beamformer(quad, budget, BisectionConfig{});
    const double used = sol.W.squaredNorm();
    worst_feas = std::max(worst_feas, (used - budget) / budget);
    worst_cs = std::max(worst_cs, sol.multiplier * std::abs(budget - used) / budget);
    if (sol.multiplier > 2.0 * lmin) {
      ++active;
      worst_tight = std::max(worst_tight, std::abs(used - budget) / budget);
      // Geometric grid scan of the power curve: the multiplier must sit in the grid
      // cell where the power crosses the budget.
      double hi = 1.0;
      while (oracle::beamformer_power(quad.Q, quad.q, hi) > budget) hi *= 2.0;
      const int pts = 4000;
      double below = lmin, above = hi;
      for (int i = 0; i <= pts; ++i) {
        const double lam = lmin * std::pow(hi / lmin, static_cast<double>(i) / pts);
        if (oracle::beamformer_power(quad.Q, quad.q, lam) > budget) {
          below = lam;
        } else {
          above = lam;
          break;
        }
      }
      if (sol.multiplier < below * (1.0 - 1e-9) || sol.multiplier > above * (1.0 + 1e-9)) {
        ++bracket_miss;
      }
    } else if (oracle::beamformer_power(quad.Q, quad.q, sol.multiplier) > budget * (1.0 + 1e-6)) {
      ++bracket_miss;
    }
  }
  r.seconds = seconds_since(t0);
  r.pass = worst_feas <= 1e-6 && worst_tight <= 1e-6 && worst_cs <= 1e-6 && bracket_miss == 0;
  r.detail = "max excess power " + sci(std::max(worst_feas, 0.0)) + ", max |P_used-P|/P (active) " +
             sci(worst_tight) + ", max lambda|P_used-P|/P " + sci(worst_cs) + " (all <= 1e-6); " +
             std::to_string(bracket_miss) + " grid-scan mismatches; " + std::to_string(active) +
             "/100 active";
  return r;
}

CheckResult vectorization() {
  const auto t0 = Clock::now();
  CheckResult r{"4", "vectorized B-subproblem residual"};
  Rng rng(404);
  const std::vector<std::pair<int, int>> archs{{6, 1}, {8, 1}, {8, 2}, {8, 4}, {8, 8},
                                               {12, 3}, {12, 6}, {12, 12}};
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto [m, ne] = archs[n % archs.size()];
    const RisArchitecture arch(m / ne, ne);
    const int k = 1 + n % 3;
    const AdmittanceMatrix b = oracle::random_admittance(arch, rng, rng.uniform(0.1, 2.0));
    BSubproblem sub{Eigen::MatrixXd(m, 2 * k), Eigen::MatrixXd(m, 2 * k)};
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < 2 * k; ++j) {
        sub.M(i, j) = rng.normal();
        sub.Gamma(i, j) = rng.normal();
      }
    }
    const LinearMap map = assemble_linear_map(sub, arch);
    const double lhs = (map.A * pack_upper(b) - map.b).squaredNorm();
    const double rhs = oracle::vectorized_residual(b.dense(), sub.M, sub.Gamma);
    worst = std::max(worst, rel_diff(lhs, rhs));
  }
  r.seconds = seconds_since(t0);
  r.pass = worst <= 1e-10;
  r.detail = "max relative gap " + sci(worst) + " (<= 1e-10) over 200 draws, N_E in {1,2,3,4,6,8,12}";
  return r;
}

CheckResult placement_equivalence() {
  const auto t0 = Clock::now();
  CheckResult r{"5", "placement objective differs from the direct objective by a constant"};
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const PlacementCase pc = placement_case(5000 + s);
    const PlacementCoefficients co =
        build_coefficients(pc.prob, pc.inst.scenario.geometry.group_refs, pc.group);
    const Rect box = pc.inst.scenario.geometry.reference_box();
    Rng rng(5100 + s);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 20; ++i) {
      const Vec2 c = random_point(box, rng);
      const double diff =
          mu(co, c) - oracle::direct_placement_objective(pc.inst.scenario.geometry,
                                                         pc.inst.scenario.env, pc.inst.theta.dense(),
                                                         pc.inst.w, pc.aux, pc.group, c);
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    worst = std::max(worst, hi - lo);
  }
  r.seconds = seconds_since(t0);
  r.pass = worst < 1e-8;
  r.detail = "max spread " + sci(worst) + " (< 1e-8) over 20 scenarios x 20 positions";
  return r;
}

CheckResult gradient() {
  const auto t0 = Clock::now();
  CheckResult r{"6", "analytic gradient vs central differences"};
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const PlacementCase pc = placement_case(6000 + s);
    const PlacementCoefficients co =
        build_coefficients(pc.prob, pc.inst.scenario.geometry.group_refs, pc.group);
    Rng rng(6100 + s);
    const Vec2 c = random_point(pc.inst.scenario.geometry.reference_box(), rng);
    const double h = 1e-6 * co.wavelength;
    const Vec2 fd = oracle::fd_gradient([&](const Vec2& x) { return mu(co, x); }, c, h);
    const Vec2 an = gradient_mu(co, c);
    worst = std::max(worst, (an - fd).norm() / std::max(fd.norm(), 1e-300));
  }
  r.seconds = seconds_since(t0);
  r.pass = worst < 1e-4;
  r.detail = "max relative error " + sci(worst) + " (< 1e-4), step 1e-6 lambda, 50 instances";
  return r;
}

CheckResult minorization() {
  const auto t0 = Clock::now();
  CheckResult r{"7", "surrogate minorizes mu and the curvature bound dominates the Hessian"};
  double worst_gap = -1e300;
  double worst_ratio = 0.0;  // sampled ||H|| / delta
  double worst_formula_ratio = 0.0;
  int cases = 0;
  for (int s = 0; s < 10; ++s) {
    const PlacementCase pc = placement_case(7000 + s);
    const SystemGeometry& geo = pc.inst.scenario.geometry;
    const PlacementCoefficients co = build_coefficients(pc.prob, geo.group_refs, pc.group);
    const SurrogateModel sur = build_surrogate(co, geo.group_refs[pc.group]);
    const double formula = curvature_bound_frobenius(co);
    Rng rng(7100 + s);
    const Rect box = geo.reference_box();
    int drawn = 0;
    for (int tries = 0; drawn < 100 && tries < 100000; ++tries) {
      const Vec2 c = random_point(box, rng);
      bool ok = true;
      for (int h = 0; h < geo.num_groups(); ++h) {
        if (h != pc.group && (c - geo.group_refs[h]).norm() < geo.min_spacing) ok = false;
      }
      if (!ok) continue;
      ++drawn;
      worst_gap = std::max(worst_gap, sur(c) - mu(co, c));
      const double hn = oracle::fd_hessian_norm(
          [&](const Vec2& x) { return gradient_mu(co, x); }, c, 1e-5 * co.wavelength);
      worst_ratio = std::max(worst_ratio, hn / sur.curvature);
      worst_formula_ratio = std::max(worst_formula_ratio, hn / formula);
    }
    cases += drawn;
  }
  r.seconds = seconds_since(t0);
  r.pass = worst_gap <= 1e-9 && worst_ratio <= 1.0 && cases == 1000;
  r.detail = "max surrogate - mu = " + sci(worst_gap) + " (<= 1e-9), max sampled ||Hess||/delta = " +
             fix(worst_ratio) + " (<= 1; Frobenius-formula alone: " + fix(worst_formula_ratio) +
             "), " + std::to_string(cases) + " feasible points in 10 instances";
  return r;
}

CheckResult monotone_convergence() {
  const auto t0 = Clock::now();
  CheckResult r{"8", "monotone trace and convergence on the default scenario"};
  ExperimentSpec spec;
  spec.num_elements = {16};
  spec.num_bs_antennas = {4};
  spec.num_paths = {6};
  spec.architectures = {"group"};
  spec.mobility = {Mobility::kMovable};
  spec.base_seed = 8;
  const SweepPoint pt = expand_sweep(spec).front();
  double worst_drop = 0.0, slowest = 0.0;
  int converged = 0, max_iters = 0;
  for (int t = 0; t < 20; ++t) {
    const auto t1 = Clock::now();
    const OptimizeResult res = optimize(make_scenario(spec, pt, t),
                                        RisArchitecture(pt.num_groups(), pt.group_size),
                                        make_optimizer_config(spec, pt));
    slowest = std::max(slowest, seconds_since(t1));
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      worst_drop = std::max(worst_drop, res.trace[i - 1] - res.trace[i]);
    }
    if (res.converged) ++converged;
    max_iters = std::max(max_iters, res.outer_iterations);
  }
  r.seconds = seconds_since(t0);
  r.pass = worst_drop <= 1e-6 && converged == 20 && slowest < 120.0;
  r.detail = "max step decrease " + sci(worst_drop) + " (<= 1e-6); " + std::to_string(converged) +
             "/20 reached < 1e-4 relative change within 100 outer iterations (max used " +
             std::to_string(max_iters) + "); slowest run " + fix(slowest, 1) + " s (< 120 s)";
  return r;
}

CheckResult small_instance() {
  const auto t0 = Clock::now();
  CheckResult r{"9", "single-element instance vs exhaustive grids"};
  double worst_fixed = 0.0, worst_mov = 0.0;
  for (int s = 0; s < 10; ++s) {
    EnvironmentParams ep;
    ep.num_users = 1;
    ep.num_paths = 6;
    Scenario sc;
    sc.env = sample_environment(ep, 9000 + s);
    sc.noise_power = dbm_to_watt(-80.0);
    GeometryParams gp;
    gp.num_elements = 1;
    gp.num_bs_antennas = 2;
    sc.geometry = make_geometry(gp, sc.env.ue_positions);
    // A single element has zero fixed-array length; give it a 2 x 4 wavelength region.
    sc.geometry.region.hi.x() = 2.0 * sc.geometry.wavelength;
    const RisArchitecture arch(1, 1);
    OptimizerConfig cfg;
    cfg.transmit_power_w = dbm_to_watt(10.0);

    auto grid_rate = [&](const SystemGeometry& geo, int phases) {
      const Eigen::MatrixXcd h = oracle::bs_ris_channel(geo, sc.env);
      const Eigen::MatrixXcd hu = oracle::ris_ue_channels(geo, sc.env);
      double best = 0.0;
      for (int i = 0; i < phases; ++i) {
        const Eigen::MatrixXcd th = Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, 2.0 * kPi * i / phases));
        Eigen::MatrixXcd w = (hu.adjoint() * th * h).adjoint();
        w *= std::sqrt(cfg.transmit_power_w) / w.norm();
        best = std::max(best, oracle::sum_rate(oracle::gains(h, hu, th, w), sc.noise_power));
      }
      return best;
    };

    cfg.mobility = Mobility::kFixed;
    const double fixed_alg = optimize(sc, arch, cfg).sum_rate;
    const double fixed_grid = grid_rate(sc.geometry, 360);
    worst_fixed = std::max(worst_fixed, (fixed_grid - fixed_alg) / fixed_grid);

    cfg.mobility = Mobility::kMovable;
    const double mov_alg = optimize(sc, arch, cfg).sum_rate;
    const Rect box = sc.geometry.reference_box();
    double mov_grid = 0.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        SystemGeometry geo = sc.geometry;
        geo.group_refs[0] = box.lo + Vec2((box.hi.x() - box.lo.x()) * i / 49.0,
                                          (box.hi.y() - box.lo.y()) * j / 49.0);
        // The phase of a lone element does not change |gain|; a coarse phase grid suffices.
        mov_grid = std::max(mov_grid, grid_rate(geo, 4));
      }
    }
    worst_mov = std::max(worst_mov, (mov_grid - mov_alg) / mov_grid);
  }
  r.seconds = seconds_since(t0);
  r.pass = worst_fixed <= 0.02 && worst_mov <= 0.05;
  r.detail = "fixed: max shortfall vs 360-phase grid + MRT " + fix(100.0 * worst_fixed, 2) +
             "% (<= 2%); movable: max shortfall vs 50x50 position grid " +
             fix(100.0 * worst_mov, 2) + "% (<= 5%); 10 instances";
  return r;
}

CheckResult trends(int threads) {
  const auto t0 = Clock::now();
  const std::clock_t c0 = std::clock();
  CheckResult r{"10", "connectivity / movability trends over 50 trials per point"};
  ExperimentSpec spec;
  spec.num_elements = {16, 64};
  spec.num_bs_antennas = {4};
  spec.num_paths = {6};
  spec.architectures = {"single", "group", "fully"};
  spec.mobility = {Mobility::kMovable, Mobility::kFixed};
  spec.trials = 50;
  spec.base_seed = 10;
  const std::vector<ResultRow> rows = run_experiment(spec, threads);
  const double cpu_s = static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;

  std::map<std::tuple<int, int, int>, std::pair<double, int>> acc;  // (M, N_E, MA?) -> sum, n
  int failed = 0;
  for (const ResultRow& row : rows) {
    if (!std::isfinite(row.sum_rate)) {
      ++failed;
      continue;
    }
    auto& [sum, n] = acc[{row.num_elements, row.group_size, row.mobility == Mobility::kMovable}];
    sum += row.sum_rate;
    ++n;
  }
  auto mean = [&](int m, int ne, bool ma) {
    const auto& [sum, n] = acc[{m, ne, ma}];
    return n ? sum / n : std::nan("");
  };
  const double s64 = mean(64, 1, true), g64 = mean(64, 4, true), f64 = mean(64, 64, true);
  const bool a = f64 >= g64 && g64 >= s64;
  bool b = true;
  std::string b_detail;
  for (int m : {16, 64}) {
    for (int ne : {1, 4, m}) {
      const double gap = mean(m, ne, true) - mean(m, ne, false);
      b = b && gap >= 0.0;
      b_detail += " M" + std::to_string(m) + "/N_E" + std::to_string(ne) + " " + fix(gap);
    }
  }
  const double mf16 = mean(16, 1, true) - mean(16, 1, false);
  const double mf64 = mean(64, 1, true) - mean(64, 1, false);
  const double fs16 = mean(16, 16, true) - mean(16, 1, true);
  const double fs64 = mean(64, 64, true) - mean(64, 1, true);
  const bool c = mf16 > mf64 && fs64 > fs16;
  // Budget: 60 min on 8 cores, i.e. 480 core-minutes of CPU time.
  const bool fast = cpu_s <= 8.0 * 3600.0;

  r.seconds = seconds_since(t0);
  r.pass = a && b && c && fast && failed == 0;
  r.detail = std::string("(a) M=64 MA means fully ") + fix(f64) + " >= group " + fix(g64) +
             " >= single " + fix(s64) + (a ? " ok" : " VIOLATED") + "; (b) MA-FA gaps:" + b_detail +
             (b ? " ok" : " VIOLATED") + "; (c) single MA-FA gap M16 " + fix(mf16) + " > M64 " +
             fix(mf64) + ", fully-single gap M64 " + fix(fs64) + " > M16 " + fix(fs16) +
             (c ? " ok" : " VIOLATED") + "; " + std::to_string(failed) + " failed trials; CPU " +
             fix(cpu_s / 60.0, 1) + " core-min (<= 480)";
  return r;
}

std::vector<CheckResult> quick_checks() {
  return {scattering_constraints(), fp_identity(), beamformer_kkt(), vectorization(),
          placement_equivalence(),  gradient(),    minorization(),   small_instance()};
}

}  // namespace mabdris::check
