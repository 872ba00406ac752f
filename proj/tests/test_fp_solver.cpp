#include <doctest.h>

#include "mabdris/sim_harness.hpp"
#include "oracles.hpp"

using namespace mabdris;

namespace {

Scenario default_scenario(int trial, int m = 16, int ne = 4) {
  ExperimentSpec spec;
  SweepPoint pt;
  pt.num_elements = m;
  pt.group_size = ne;
  pt.num_bs_antennas = 4;
  pt.num_paths = 6;
  return make_scenario(spec, pt, trial);
}

}  // namespace

TEST_CASE("zero power returns W = 0 and rate 0") {
  OptimizerConfig cfg;
  cfg.transmit_power_w = 0.0;
  const OptimizeResult res = optimize(default_scenario(0), RisArchitecture(4, 4), cfg);
  CHECK(res.W.norm() == 0.0);
  CHECK(res.sum_rate == 0.0);
}

TEST_CASE("negative power and mismatched architecture are configuration errors") {
  OptimizerConfig cfg;
  CHECK_THROWS_AS(optimize(default_scenario(0), RisArchitecture(2, 8), cfg), ConfigError);
  cfg.transmit_power_w = -1.0;
  CHECK_THROWS_AS(optimize(default_scenario(0), RisArchitecture(4, 4), cfg), ConfigError);
}

TEST_CASE("block failures name the block") {
  OptimizerConfig cfg;
  cfg.admm.penalty = 0.0;
  try {
    optimize(default_scenario(0), RisArchitecture(4, 4), cfg);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.block() == "admm");
  }
}

TEST_CASE("single element, fixed position: within 2% of the phase grid with MRT") {
  for (int s = 0; s < 3; ++s) {
    EnvironmentParams ep;
    ep.num_users = 1;
    Scenario sc;
    sc.env = sample_environment(ep, 500 + s);
    sc.noise_power = dbm_to_watt(-80.0);
    GeometryParams gp;
    gp.num_elements = 1;
    gp.num_bs_antennas = 2;
    sc.geometry = make_geometry(gp, sc.env.ue_positions);
    OptimizerConfig cfg;
    cfg.mobility = Mobility::kFixed;
    const double got = optimize(sc, RisArchitecture(1, 1), cfg).sum_rate;
    const ChannelSet ch = sc.channels();
    double best = 0.0;
    for (int i = 0; i < 360; ++i) {
      const Eigen::MatrixXcd th = Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, 2.0 * kPi * i / 360));
      best = std::max(best, sum_rate(ch, th, mrt_beamformer(ch, th, cfg.transmit_power_w)));
    }
    CHECK(got >= 0.98 * best);
  }
}

TEST_CASE("trace is non-decreasing and the result is physical and feasible") {
  for (int t = 0; t < 3; ++t) {
    for (Mobility mob : {Mobility::kMovable, Mobility::kFixed}) {
      const Scenario sc = default_scenario(t);
      OptimizerConfig cfg;
      cfg.mobility = mob;
      cfg.max_outer = 30;
      const OptimizeResult res = optimize(sc, RisArchitecture(4, 4), cfg);
      for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1] - 1e-6);
      CHECK(res.sum_rate == doctest::Approx(res.trace.back()));
      CHECK(res.W.squaredNorm() <= cfg.transmit_power_w * (1.0 + 1e-6));
      CHECK(validate_scattering(res.theta.dense(), RisArchitecture(4, 4)).pass);
      SystemGeometry geo = sc.geometry;
      geo.group_refs = res.refs;
      CHECK_NOTHROW(geo.validate(1e-12));
      const ChannelSet ch = sc.channels_at(res.refs);
      CHECK(sum_rate(ch, res.theta.dense(), res.W) == doctest::Approx(res.sum_rate).epsilon(1e-10));
      if (mob == Mobility::kFixed) CHECK(res.refs == sc.geometry.group_refs);
    }
  }
}

TEST_CASE("optimization improves on the initial MRT point") {
  const OptimizeResult res = optimize(default_scenario(4, 16, 1), RisArchitecture(16, 1), OptimizerConfig{});
  CHECK(res.sum_rate > res.trace.front());
}
