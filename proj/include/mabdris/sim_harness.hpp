#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mabdris/fp_solver.hpp"

namespace mabdris {

/// Fixed physical constants of the simulated link.
struct ScenarioConstants {
  int num_users = 2;
  double rician_kappa = 1.0;
  double pathloss_gamma0_db = -30.0;
  double pathloss_alpha = 2.2;
  double noise_dbm = -80.0;
  double wavelength = 0.01;
  double bs_ris_distance = 50.0;
  double ris_ue_radius = 2.0;
  double min_ue_distance = 0.5;
  double region_width_wavelengths = 4.0;
  double reference_impedance = 50.0;
  double admm_penalty = 0.5;
  double admm_proximal = 0.1;
};

struct SolverLimits {
  double tol_outer = 1e-4;
  int max_outer = 100;
  double tol_admm = 1e-5;
  int max_admm = 300;
  double tol_position_wavelengths = 1e-4;
  int max_sca = 20;
};

struct ExperimentSpec {
  std::vector<int> num_elements{16, 36, 64};
  std::vector<int> num_bs_antennas{4, 16};
  std::vector<int> num_paths{4, 6, 8};
  std::vector<double> scale_factors{1.2};
  // "single", "fully", "group" (N_E = 4) or "group:<N_E>"
  std::vector<std::string> architectures{"single", "group", "fully"};
  std::vector<Mobility> mobility{Mobility::kMovable, Mobility::kFixed};
  std::vector<double> power_dbm{10.0};
  int trials = 50;
  std::uint64_t base_seed = 1;
  ScenarioConstants constants;
  SolverLimits limits;
  // Whether the values were given explicitly rather than taken from defaults.
  bool power_given = false;
  bool trials_given = false;
};

/// Parses a JSON experiment file; any key not recognized raises ConfigError.
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Group size for an architecture name at M elements; ConfigError if it does not divide M.
int resolve_group_size(const std::string& architecture, int num_elements);

struct SweepPoint {
  int id = 0;
  int num_elements = 0;
  int group_size = 1;
  int num_bs_antennas = 0;
  int num_paths = 0;
  double scale_factor = 1.2;
  Mobility mobility = Mobility::kMovable;
  double power_dbm = 10.0;

  int num_groups() const { return num_elements / group_size; }
};

/// Cartesian product in the order L, N_t, M, architecture, l_s, mobility, P.
std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec);

/// Seed of the channel draw for a trial. Points that differ only in M, N_t, architecture,
/// mobility, l_s or P share the draw so their comparison is paired.
std::uint64_t environment_seed(std::uint64_t base_seed, const SweepPoint& point, int trial);

Scenario make_scenario(const ExperimentSpec& spec, const SweepPoint& point, int trial);
OptimizerConfig make_optimizer_config(const ExperimentSpec& spec, const SweepPoint& point);

struct ResultRow {
  int point_id = 0;
  int num_elements = 0;
  int num_groups = 0;
  int group_size = 0;
  int num_bs_antennas = 0;
  int num_paths = 0;
  double scale_factor = 0.0;
  Mobility mobility = Mobility::kMovable;
  double power_dbm = 0.0;
  int trial = 0;
  double sum_rate = 0.0;
  int outer_iters = 0;
  double admm_resid = 0.0;
  double wall_ms = 0.0;
  std::string flags = "ok";
};

/// Runs one trial; failures are recorded in `flags` instead of thrown.
ResultRow run_trial(const ExperimentSpec& spec, const SweepPoint& point, int trial);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Rows ordered by (point, trial) regardless of the thread count.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int threads,
                                      const ProgressFn& progress = {});

extern const char* const kCsvHeader;
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

struct PointSummary {
  int num_elements = 0;
  int group_size = 0;
  int num_bs_antennas = 0;
  int num_paths = 0;
  double scale_factor = 0.0;
  Mobility mobility = Mobility::kMovable;
  double power_dbm = 0.0;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Difference of trial means between two points that share every other axis.
struct GapSummary {
  std::string kind;  // "MA-FA" or "<arch>-single"
  int num_elements = 0;
  int group_size = 0;  // architecture of the minuend
  int num_bs_antennas = 0;
  int num_paths = 0;
  double scale_factor = 0.0;
  Mobility mobility = Mobility::kMovable;  // only meaningful for connectivity gaps
  double power_dbm = 0.0;
  double gap = 0.0;
};

struct Summary {
  std::vector<PointSummary> points;
  std::vector<GapSummary> gaps;
};

Summary summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const Summary& s);
void write_gaps_csv(std::ostream& os, const Summary& s);

/// Writes results.csv, summary.csv, gaps.csv, metadata.json and the plot scripts.
void emit(const std::filesystem::path& out_dir, const ExperimentSpec& spec,
          const std::vector<ResultRow>& rows);

}  // namespace mabdris
