#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "checks.hpp"
#include "mabdris/sim_harness.hpp"

using namespace mabdris;

namespace {

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<int> trials, int threads) {
  ExperimentSpec spec = load_experiment(config);
  if (seed) spec.base_seed = *seed;
  if (trials) {
    if (*trials < 0) throw ConfigError("--trials must be >= 0");
    spec.trials = *trials;
    spec.trials_given = true;
  }
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto points = expand_sweep(spec);
  std::cerr << points.size() << " points x " << spec.trials << " trials on " << threads
            << " threads\n";
  std::size_t last_pct = 101;
  const auto rows = run_experiment(spec, threads, [&](std::size_t done, std::size_t total) {
    const std::size_t pct = total ? 100 * done / total : 100;
    if (pct / 5 != last_pct / 5) {
      last_pct = pct;
      std::cerr << "\r" << pct << "% (" << done << "/" << total << ")" << std::flush;
    }
  });
  std::cerr << "\n";
  emit(out, spec, rows);
  int failed = 0;
  for (const auto& r : rows) failed += r.flags.rfind("error", 0) == 0;
  std::cerr << "wrote " << out << " (" << rows.size() << " rows, " << failed << " errors)\n";
  return 0;
}

int cmd_summarize(const std::string& input, const std::string& out) {
  std::ifstream is(input);
  if (!is) throw ConfigError("cannot open " + input);
  const Summary s = summarize(read_csv(is));
  if (out.empty()) {
    write_summary_csv(std::cout, s);
    std::cout << "\n";
    write_gaps_csv(std::cout, s);
    return 0;
  }
  std::filesystem::create_directories(out);
  std::ofstream sum(std::filesystem::path(out) / "summary.csv");
  write_summary_csv(sum, s);
  std::ofstream gaps(std::filesystem::path(out) / "gaps.csv");
  write_gaps_csv(gaps, s);
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& r : check::quick_checks()) {
    std::cout << check::format(r) << "\n";
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo harness for movable group-connected BD-RIS sum-rate optimization"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a sweep described by a JSON config");
  std::string config, out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int threads = 0;
  run->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Base seed (overrides the config)");
  run->add_option("--trials", trials, "Trials per point (overrides the config)");
  run->add_option("--threads", threads, "Worker threads, 0 = all cores");

  auto* sum = app.add_subcommand("summarize", "Aggregate a results.csv");
  std::string input, sum_out;
  sum->add_option("input", input, "results.csv")->required()->check(CLI::ExistingFile);
  sum->add_option("--out", sum_out, "Directory for summary.csv and gaps.csv (default: stdout)");

  auto* self = app.add_subcommand("selftest", "Run the fast oracle checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, seed, trials, threads);
    if (*sum) return cmd_summarize(input, sum_out);
    if (*self) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
