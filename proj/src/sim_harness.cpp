#include "mabdris/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mabdris/random.hpp"

namespace mabdris {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
std::vector<T> as_list(const json& v, const std::string& key) {
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
void read_scalar(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

Mobility parse_mobility(const std::string& s) {
  if (s == "MA" || s == "ma" || s == "movable") return Mobility::kMovable;
  if (s == "FA" || s == "fa" || s == "fixed") return Mobility::kFixed;
  throw ConfigError("config: mobility must be MA or FA, got '" + s + "'");
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  reject_unknown(root,
                 {"M", "N_t", "L", "l_s", "architectures", "mobility", "P_dBm", "trials", "seed",
                  "constants", "limits"},
                 "config");
  ExperimentSpec spec;
  if (root.contains("M")) spec.num_elements = as_list<int>(root["M"], "M");
  if (root.contains("N_t")) spec.num_bs_antennas = as_list<int>(root["N_t"], "N_t");
  if (root.contains("L")) spec.num_paths = as_list<int>(root["L"], "L");
  if (root.contains("l_s")) spec.scale_factors = as_list<double>(root["l_s"], "l_s");
  if (root.contains("architectures")) {
    spec.architectures = as_list<std::string>(root["architectures"], "architectures");
  }
  if (root.contains("mobility")) {
    spec.mobility.clear();
    for (const std::string& s : as_list<std::string>(root["mobility"], "mobility")) {
      spec.mobility.push_back(parse_mobility(s));
    }
  }
  if (root.contains("P_dBm")) {
    spec.power_dbm = as_list<double>(root["P_dBm"], "P_dBm");
    spec.power_given = true;
  }
  if (root.contains("trials")) {
    read_scalar(root, "trials", spec.trials);
    spec.trials_given = true;
  }
  read_scalar(root, "seed", spec.base_seed);

  if (root.contains("constants")) {
    const json& c = root["constants"];
    reject_unknown(c,
                   {"K", "kappa", "gamma0_dB", "alpha", "noise_dBm", "wavelength", "d_BI", "d_IU",
                    "min_ue_distance", "region_width_wavelengths", "Z0", "admm_penalty",
                    "admm_proximal"},
                   "constants");
    ScenarioConstants& k = spec.constants;
    read_scalar(c, "K", k.num_users);
    read_scalar(c, "kappa", k.rician_kappa);
    read_scalar(c, "gamma0_dB", k.pathloss_gamma0_db);
    read_scalar(c, "alpha", k.pathloss_alpha);
    read_scalar(c, "noise_dBm", k.noise_dbm);
    read_scalar(c, "wavelength", k.wavelength);
    read_scalar(c, "d_BI", k.bs_ris_distance);
    read_scalar(c, "d_IU", k.ris_ue_radius);
    read_scalar(c, "min_ue_distance", k.min_ue_distance);
    read_scalar(c, "region_width_wavelengths", k.region_width_wavelengths);
    read_scalar(c, "Z0", k.reference_impedance);
    read_scalar(c, "admm_penalty", k.admm_penalty);
    read_scalar(c, "admm_proximal", k.admm_proximal);
  }
  if (root.contains("limits")) {
    const json& l = root["limits"];
    reject_unknown(l, {"tol_outer", "max_outer", "tol_admm", "max_admm", "tol_pos_wavelengths", "max_sca"},
                   "limits");
    SolverLimits& s = spec.limits;
    read_scalar(l, "tol_outer", s.tol_outer);
    read_scalar(l, "max_outer", s.max_outer);
    read_scalar(l, "tol_admm", s.tol_admm);
    read_scalar(l, "max_admm", s.max_admm);
    read_scalar(l, "tol_pos_wavelengths", s.tol_position_wavelengths);
    read_scalar(l, "max_sca", s.max_sca);
  }

  if (spec.trials < 0) throw ConfigError("config: trials must be >= 0");
  if (spec.constants.num_users < 1) throw ConfigError("config: K must be >= 1");
  for (int l : spec.num_paths) {
    if (l < 1) throw ConfigError("config: L must be >= 1");
  }
  for (int n : spec.num_bs_antennas) {
    if (n < 1) throw ConfigError("config: N_t must be >= 1");
  }
  // Validates every architecture against every M up front.
  for (int m : spec.num_elements) {
    for (const std::string& a : spec.architectures) resolve_group_size(a, m);
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

int resolve_group_size(const std::string& architecture, int num_elements) {
  if (num_elements < 1) throw ConfigError("config: M must be >= 1");
  int n = 0;
  if (architecture == "single") {
    n = 1;
  } else if (architecture == "fully") {
    n = num_elements;
  } else if (architecture == "group") {
    n = 4;
  } else if (architecture.starts_with("group:")) {
    const std::string tail = architecture.substr(6);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
    if (ec != std::errc() || ptr != tail.data() + tail.size() || n < 1) {
      throw ConfigError("config: bad architecture '" + architecture + "'");
    }
  } else {
    throw ConfigError("config: unknown architecture '" + architecture + "'");
  }
  if (num_elements % n != 0) {
    throw ConfigError("config: group size " + std::to_string(n) + " does not divide M = " +
                      std::to_string(num_elements));
  }
  return n;
}

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec) {
  std::vector<SweepPoint> pts;
  for (int l : spec.num_paths) {
    for (int nt : spec.num_bs_antennas) {
      for (int m : spec.num_elements) {
        for (const std::string& a : spec.architectures) {
          for (double ls : spec.scale_factors) {
            for (Mobility mob : spec.mobility) {
              for (double p : spec.power_dbm) {
                SweepPoint pt;
                pt.id = static_cast<int>(pts.size());
                pt.num_elements = m;
                pt.group_size = resolve_group_size(a, m);
                pt.num_bs_antennas = nt;
                pt.num_paths = l;
                pt.scale_factor = ls;
                pt.mobility = mob;
                pt.power_dbm = p;
                pts.push_back(pt);
              }
            }
          }
        }
      }
    }
  }
  return pts;
}

std::uint64_t environment_seed(std::uint64_t base_seed, const SweepPoint& point, int trial) {
  return hash_combine({base_seed, static_cast<std::uint64_t>(point.num_paths),
                       static_cast<std::uint64_t>(trial)});
}

Scenario make_scenario(const ExperimentSpec& spec, const SweepPoint& point, int trial) {
  const ScenarioConstants& c = spec.constants;
  EnvironmentParams ep;
  ep.num_users = c.num_users;
  ep.num_paths = point.num_paths;
  ep.rician_kappa = c.rician_kappa;
  ep.pathloss_gamma0_db = c.pathloss_gamma0_db;
  ep.pathloss_alpha = c.pathloss_alpha;
  ep.bs_ris_distance = c.bs_ris_distance;
  ep.ris_ue_radius = c.ris_ue_radius;
  ep.min_ue_distance = c.min_ue_distance;

  Scenario sc;
  sc.env = sample_environment(ep, environment_seed(spec.base_seed, point, trial));

  GeometryParams gp;
  gp.num_elements = point.num_elements;
  gp.group_size = point.group_size;
  gp.num_bs_antennas = point.num_bs_antennas;
  gp.scale_factor = point.scale_factor;
  gp.wavelength = c.wavelength;
  gp.region_width_wavelengths = c.region_width_wavelengths;
  gp.bs_ris_distance = c.bs_ris_distance;
  gp.ris_ue_radius = c.ris_ue_radius;
  sc.geometry = make_geometry(gp, sc.env.ue_positions);
  sc.noise_power = dbm_to_watt(c.noise_dbm);
  return sc;
}

OptimizerConfig make_optimizer_config(const ExperimentSpec& spec, const SweepPoint& point) {
  OptimizerConfig cfg;
  cfg.transmit_power_w = dbm_to_watt(point.power_dbm);
  cfg.mobility = point.mobility;
  cfg.tol_outer = spec.limits.tol_outer;
  cfg.max_outer = spec.limits.max_outer;
  cfg.admm.penalty = spec.constants.admm_penalty;
  cfg.admm.proximal = spec.constants.admm_proximal;
  cfg.admm.tolerance = spec.limits.tol_admm;
  cfg.admm.max_iterations = spec.limits.max_admm;
  cfg.admm.reference_impedance = spec.constants.reference_impedance;
  cfg.placement.tol_position_wavelengths = spec.limits.tol_position_wavelengths;
  cfg.placement.max_sweeps = spec.limits.max_sca;
  return cfg;
}

ResultRow run_trial(const ExperimentSpec& spec, const SweepPoint& point, int trial) {
  ResultRow row;
  row.point_id = point.id;
  row.num_elements = point.num_elements;
  row.num_groups = point.num_groups();
  row.group_size = point.group_size;
  row.num_bs_antennas = point.num_bs_antennas;
  row.num_paths = point.num_paths;
  row.scale_factor = point.scale_factor;
  row.mobility = point.mobility;
  row.power_dbm = point.power_dbm;
  row.trial = trial;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Scenario sc = make_scenario(spec, point, trial);
    const OptimizeResult res =
        optimize(sc, RisArchitecture(point.num_groups(), point.group_size),
                 make_optimizer_config(spec, point));
    row.sum_rate = res.sum_rate;
    row.outer_iters = res.outer_iterations;
    row.admm_resid = res.admm_residual;
    if (!res.flags.empty()) {
      row.flags.clear();
      for (const std::string& f : res.flags) row.flags += (row.flags.empty() ? "" : "|") + f;
    }
  } catch (const SolverError& e) {
    row.sum_rate = std::nan("");
    row.flags = "error:" + e.block();
  } catch (const std::exception&) {
    row.sum_rate = std::nan("");
    row.flags = "error:setup";
  }
  row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int threads,
                                      const ProgressFn& progress) {
  const std::vector<SweepPoint> pts = expand_sweep(spec);
  const std::size_t trials = static_cast<std::size_t>(std::max(spec.trials, 0));
  const std::size_t total = pts.size() * trials;
  std::vector<ResultRow> rows(total);
  if (total == 0) return rows;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      rows[i] = run_trial(spec, pts[i / trials], static_cast<int>(i % trials));
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mu);
        progress(d, total);
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(total, 1024)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return rows;
}

const char* const kCsvHeader =
    "point_id,M,N_G,N_E,N_t,L,l_s,mobility,P_dBm,trial,sum_rate_bps_hz,outer_iters,admm_resid,"
    "wall_ms,flags";

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << r.point_id << ',' << r.num_elements << ',' << r.num_groups << ',' << r.group_size << ','
       << r.num_bs_antennas << ',' << r.num_paths << ',' << fmt(r.scale_factor) << ','
       << mobility_label(r.mobility) << ',' << fmt(r.power_dbm) << ',' << r.trial << ','
       << fmt(r.sum_rate) << ',' << r.outer_iters << ',' << fmt(r.admm_resid) << ','
       << fmt(r.wall_ms) << ',' << r.flags << '\n';
  }
}

namespace {

template <typename T>
T parse_field(const std::string& s, int line) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if constexpr (std::is_floating_point_v<T>) {
      if (s == "nan" || s == "-nan") return std::nan("");
    }
    throw ConfigError("csv line " + std::to_string(line) + ": bad field '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("csv: unexpected header");
  std::vector<ResultRow> rows;
  int ln = 1;
  while (std::getline(is, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 15) throw ConfigError("csv line " + std::to_string(ln) + ": expected 15 fields");
    ResultRow r;
    r.point_id = parse_field<int>(f[0], ln);
    r.num_elements = parse_field<int>(f[1], ln);
    r.num_groups = parse_field<int>(f[2], ln);
    r.group_size = parse_field<int>(f[3], ln);
    r.num_bs_antennas = parse_field<int>(f[4], ln);
    r.num_paths = parse_field<int>(f[5], ln);
    r.scale_factor = parse_field<double>(f[6], ln);
    r.mobility = parse_mobility(f[7]);
    r.power_dbm = parse_field<double>(f[8], ln);
    r.trial = parse_field<int>(f[9], ln);
    r.sum_rate = parse_field<double>(f[10], ln);
    r.outer_iters = parse_field<int>(f[11], ln);
    r.admm_resid = parse_field<double>(f[12], ln);
    r.wall_ms = parse_field<double>(f[13], ln);
    r.flags = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

Summary summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<int, int, int, int, double, int, double>;  // M, N_E, N_t, L, l_s, mob, P
  std::map<Key, std::vector<double>> groups;
  for (const ResultRow& r : rows) {
    if (!std::isfinite(r.sum_rate)) continue;
    groups[{r.num_elements, r.group_size, r.num_bs_antennas, r.num_paths, r.scale_factor,
            static_cast<int>(r.mobility), r.power_dbm}]
        .push_back(r.sum_rate);
  }
  Summary out;
  std::map<Key, double> means;
  for (const auto& [key, vals] : groups) {
    PointSummary p;
    std::tie(p.num_elements, p.group_size, p.num_bs_antennas, p.num_paths, p.scale_factor,
             std::ignore, p.power_dbm) = key;
    p.mobility = static_cast<Mobility>(std::get<5>(key));
    p.count = static_cast<int>(vals.size());
    double sum = 0.0;
    for (double v : vals) sum += v;
    p.mean = sum / p.count;
    double ss = 0.0;
    for (double v : vals) ss += (v - p.mean) * (v - p.mean);
    p.stddev = p.count > 1 ? std::sqrt(ss / (p.count - 1)) : 0.0;
    const double half = 1.959963984540054 * p.stddev / std::sqrt(static_cast<double>(p.count));
    p.ci_low = p.mean - half;
    p.ci_high = p.mean + half;
    means[key] = p.mean;
    out.points.push_back(p);
  }

  const int ma = static_cast<int>(Mobility::kMovable);
  const int fa = static_cast<int>(Mobility::kFixed);
  for (const auto& [key, mean] : means) {
    const auto [m, ne, nt, l, ls, mob, p] = key;
    if (mob == ma) {
      const auto it = means.find({m, ne, nt, l, ls, fa, p});
      if (it != means.end()) {
        out.gaps.push_back({"MA-FA", m, ne, nt, l, ls, Mobility::kMovable, p, mean - it->second});
      }
    }
    if (ne != 1) {
      const auto it = means.find({m, 1, nt, l, ls, mob, p});
      if (it != means.end()) {
        const std::string arch = ne == m ? "fully" : "group" + std::to_string(ne);
        out.gaps.push_back({arch + "-single", m, ne, nt, l, ls, static_cast<Mobility>(mob), p,
                            mean - it->second});
      }
    }
  }
  return out;
}

void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "M,N_E,N_t,L,l_s,mobility,P_dBm,count,mean,std,ci_low,ci_high\n";
  for (const PointSummary& p : s.points) {
    os << p.num_elements << ',' << p.group_size << ',' << p.num_bs_antennas << ',' << p.num_paths
       << ',' << fmt(p.scale_factor) << ',' << mobility_label(p.mobility) << ','
       << fmt(p.power_dbm) << ',' << p.count << ',' << fmt(p.mean) << ',' << fmt(p.stddev) << ','
       << fmt(p.ci_low) << ',' << fmt(p.ci_high) << '\n';
  }
}

void write_gaps_csv(std::ostream& os, const Summary& s) {
  os << "kind,M,N_E,N_t,L,l_s,mobility,P_dBm,gap\n";
  for (const GapSummary& g : s.gaps) {
    os << g.kind << ',' << g.num_elements << ',' << g.group_size << ',' << g.num_bs_antennas << ','
       << g.num_paths << ',' << fmt(g.scale_factor) << ','
       << (g.kind == "MA-FA" ? "-" : mobility_label(g.mobility)) << ',' << fmt(g.power_dbm)
       << ',' << fmt(g.gap) << '\n';
  }
}

namespace {

constexpr const char* kPlotCommon = R"PY(import sys
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "summary.csv")


def arch(row):
    if row["N_E"] == 1:
        return "single"
    if row["N_E"] == row["M"]:
        return "fully"
    return "group%d" % row["N_E"]


df["arch"] = df.apply(arch, axis=1)
)PY";

void write_plot_scripts(const std::filesystem::path& dir) {
  {
    std::ofstream f(dir / "plot_rate_vs_M_by_L.py");
    f << kPlotCommon << R"PY(
nt = df["N_t"].min()
sub = df[df["N_t"] == nt]
fig, axes = plt.subplots(1, sub["L"].nunique(), figsize=(5 * sub["L"].nunique(), 4), squeeze=False)
for ax, (l, part) in zip(axes[0], sub.groupby("L")):
    for (a, mob), s in part.groupby(["arch", "mobility"]):
        s = s.sort_values("M")
        ax.errorbar(s["M"], s["mean"], yerr=s["mean"] - s["ci_low"], marker="o",
                    linestyle="-" if mob == "MA" else "--", label="%s %s" % (a, mob))
    ax.set_title("L = %d, N_t = %d" % (l, nt))
    ax.set_xlabel("M")
    ax.set_ylabel("sum-rate (bps/Hz)")
    ax.legend()
fig.tight_layout()
fig.savefig("rate_vs_M_by_L.png", dpi=150)
)PY";
  }
  {
    std::ofstream f(dir / "plot_rate_vs_M_by_Nt.py");
    f << kPlotCommon << R"PY(
l = df["L"].min()
sub = df[df["L"] == l]
fig, axes = plt.subplots(1, sub["N_t"].nunique(), figsize=(5 * sub["N_t"].nunique(), 4), squeeze=False)
for ax, (nt, part) in zip(axes[0], sub.groupby("N_t")):
    for (a, mob), s in part.groupby(["arch", "mobility"]):
        s = s.sort_values("M")
        ax.errorbar(s["M"], s["mean"], yerr=s["mean"] - s["ci_low"], marker="o",
                    linestyle="-" if mob == "MA" else "--", label="%s %s" % (a, mob))
    ax.set_title("N_t = %d, L = %d" % (nt, l))
    ax.set_xlabel("M")
    ax.set_ylabel("sum-rate (bps/Hz)")
    ax.legend()
fig.tight_layout()
fig.savefig("rate_vs_M_by_Nt.png", dpi=150)
)PY";
  }
  {
    std::ofstream f(dir / "plot_rate_vs_ls.py");
    f << kPlotCommon << R"PY(
fig, ax = plt.subplots(figsize=(5, 4))
for (m, ne, mob), s in df.groupby(["M", "N_E", "mobility"]):
    s = s.groupby("l_s", as_index=False)["mean"].mean().sort_values("l_s")
    ax.plot(s["l_s"], s["mean"], marker="o", linestyle="-" if mob == "MA" else "--",
            label="M=%d N_E=%d %s" % (m, ne, mob))
ax.set_xlabel("l_s")
ax.set_ylabel("sum-rate (bps/Hz)")
ax.legend()
fig.tight_layout()
fig.savefig("rate_vs_ls.png", dpi=150)
)PY";
  }
}

}  // namespace

void emit(const std::filesystem::path& out_dir, const ExperimentSpec& spec,
          const std::vector<ResultRow>& rows) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "results.csv");
    write_csv(f, rows);
  }
  const Summary s = summarize(rows);
  {
    std::ofstream f(out_dir / "summary.csv");
    write_summary_csv(f, s);
  }
  {
    std::ofstream f(out_dir / "gaps.csv");
    write_gaps_csv(f, s);
  }
  json meta;
  meta["base_seed"] = spec.base_seed;
  meta["trials"] = spec.trials;
  meta["trials_source"] = spec.trials_given ? "config" : "default";
  meta["P_dBm"] = spec.power_dbm;
  meta["P_source"] = spec.power_given ? "config" : "default";
  meta["M"] = spec.num_elements;
  meta["N_t"] = spec.num_bs_antennas;
  meta["L"] = spec.num_paths;
  meta["l_s"] = spec.scale_factors;
  meta["architectures"] = spec.architectures;
  std::vector<std::string> mob;
  for (Mobility m : spec.mobility) mob.push_back(mobility_label(m));
  meta["mobility"] = mob;
  const ScenarioConstants& c = spec.constants;
  meta["constants"] = {{"K", c.num_users},
                       {"kappa", c.rician_kappa},
                       {"gamma0_dB", c.pathloss_gamma0_db},
                       {"alpha", c.pathloss_alpha},
                       {"noise_dBm", c.noise_dbm},
                       {"wavelength", c.wavelength},
                       {"d_BI", c.bs_ris_distance},
                       {"d_IU", c.ris_ue_radius},
                       {"min_ue_distance", c.min_ue_distance},
                       {"region_width_wavelengths", c.region_width_wavelengths},
                       {"Z0", c.reference_impedance},
                       {"admm_penalty", c.admm_penalty},
                       {"admm_proximal", c.admm_proximal}};
  const SolverLimits& l = spec.limits;
  meta["limits"] = {{"tol_outer", l.tol_outer},         {"max_outer", l.max_outer},
                    {"tol_admm", l.tol_admm},           {"max_admm", l.max_admm},
                    {"tol_pos_wavelengths", l.tol_position_wavelengths},
                    {"max_sca", l.max_sca}};
  meta["rows"] = rows.size();
  {
    std::ofstream f(out_dir / "metadata.json");
    f << meta.dump(2) << '\n';
  }
  write_plot_scripts(out_dir);
}

}  // namespace mabdris
