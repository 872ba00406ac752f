#include "mabdris/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mabdris/random.hpp"

namespace mabdris {

Eigen::MatrixX2d PathAngles::projections() const {
  if (azimuth.size() != elevation.size()) {
    throw ConfigError("path angles: azimuth/elevation length mismatch");
  }
  Eigen::MatrixX2d proj(static_cast<Eigen::Index>(size()), 2);
  for (std::size_t p = 0; p < size(); ++p) {
    const auto i = static_cast<Eigen::Index>(p);
    proj(i, 0) = std::sin(azimuth[p]) * std::cos(elevation[p]);
    proj(i, 1) = std::sin(elevation[p]);
  }
  return proj;
}

Rect SystemGeometry::reference_box() const {
  Rect box = region;
  if (intra_group_offsets.empty()) return box;
  Vec2 omin = intra_group_offsets.front();
  Vec2 omax = omin;
  for (const Vec2& o : intra_group_offsets) {
    omin = omin.cwiseMin(o);
    omax = omax.cwiseMax(o);
  }
  box.lo = region.lo - omin;
  box.hi = region.hi - omax;
  return box;
}

void SystemGeometry::validate(double tol) const {
  if (group_refs.empty() || intra_group_offsets.empty()) {
    throw ConfigError("geometry: no RIS groups");
  }
  if (bs_positions.empty()) throw ConfigError("geometry: no BS antennas");
  if (!(wavelength > 0.0)) throw ConfigError("geometry: wavelength must be positive");
  const double scale = std::max(1.0, (region.hi - region.lo).norm());
  for (int g = 0; g < num_groups(); ++g) {
    for (const Vec2& o : intra_group_offsets) {
      if (!region.contains(group_refs[g] + o, tol * scale)) {
        throw ConfigError("geometry: element of group " + std::to_string(g) +
                          " lies outside the movable region");
      }
    }
    for (int h = g + 1; h < num_groups(); ++h) {
      const double dist = (group_refs[g] - group_refs[h]).norm();
      if (dist < min_spacing * (1.0 - tol) - tol) {
        throw ConfigError("geometry: groups " + std::to_string(g) + " and " +
                          std::to_string(h) + " violate the minimum spacing");
      }
    }
  }
}

SystemGeometry make_geometry(const GeometryParams& p, std::vector<Vec2> ue_positions) {
  if (p.num_elements <= 0 || p.group_size <= 0 || p.num_elements % p.group_size != 0) {
    throw ConfigError("geometry: group size must divide the number of RIS elements");
  }
  if (p.num_bs_antennas <= 0) throw ConfigError("geometry: need at least one BS antenna");
  if (!(p.wavelength > 0.0)) throw ConfigError("geometry: wavelength must be positive");
  if (p.scale_factor < 1.0) {
    throw ConfigError("geometry: scale factor below 1 cannot hold the fixed layout");
  }
  const double half = p.wavelength / 2.0;
  SystemGeometry geo;
  geo.wavelength = p.wavelength;
  geo.bs_ris_distance = p.bs_ris_distance;
  geo.ris_ue_radius = p.ris_ue_radius;
  geo.ue_positions = std::move(ue_positions);
  for (int n = 0; n < p.num_bs_antennas; ++n) geo.bs_positions.emplace_back(n * half, 0.0);
  for (int m = 0; m < p.group_size; ++m) geo.intra_group_offsets.emplace_back(m * half, 0.0);

  const int num_groups = p.num_elements / p.group_size;
  const double fa_length = (p.num_elements - 1) * half;
  const double width = p.region_width_wavelengths * p.wavelength;
  geo.region.lo = Vec2(0.0, -width / 2.0);
  geo.region.hi = Vec2(p.scale_factor * fa_length, width / 2.0);
  geo.min_spacing = p.min_spacing.value_or(p.group_size * half);
  for (int g = 0; g < num_groups; ++g) geo.group_refs.emplace_back(g * p.group_size * half, 0.0);
  return geo;
}

double path_loss_gain(double gamma0_db, double alpha, double distance) {
  return db_to_linear(gamma0_db) * std::pow(distance, -alpha);
}

namespace {

PathAngles sample_angles(Rng& rng, int count) {
  PathAngles a;
  a.azimuth.reserve(count);
  a.elevation.reserve(count);
  for (int p = 0; p < count; ++p) {
    a.azimuth.push_back(rng.uniform(-kPi / 2.0, kPi / 2.0));
    a.elevation.push_back(rng.uniform(-kPi / 2.0, kPi / 2.0));
  }
  return a;
}

Eigen::MatrixXcd sample_prm(Rng& rng, int paths, double kappa, double gain) {
  Eigen::MatrixXcd prm = Eigen::MatrixXcd::Zero(paths, paths);
  const double amp = std::sqrt(gain);
  if (paths == 1) {
    prm(0, 0) = amp * rng.complex_normal(1.0);
    return prm;
  }
  prm(0, 0) = amp * rng.complex_normal(kappa / (kappa + 1.0));
  const double nlos = 1.0 / ((kappa + 1.0) * (paths - 1));
  for (int l = 1; l < paths; ++l) prm(l, l) = amp * rng.complex_normal(nlos);
  return prm;
}

}  // namespace

PathEnvironment sample_environment(const EnvironmentParams& params, std::uint64_t seed) {
  if (params.num_paths < 1) throw ConfigError("environment: need at least one path");
  if (params.num_users < 1) throw ConfigError("environment: need at least one UE");
  if (params.rician_kappa < 0.0) throw ConfigError("environment: kappa must be nonnegative");

  Rng rng(seed);
  PathEnvironment env;
  // Fixed draw order: UE positions, BS AoD, RIS AoA, per-UE AoD, BS-RIS PRM, RIS-UE PRMs.
  for (int k = 0; k < params.num_users; ++k) {
    const double r = params.ris_ue_radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * kPi * rng.uniform();
    env.ue_positions.emplace_back(r * std::cos(phi), r * std::sin(phi));
  }
  env.bs_departure = sample_angles(rng, params.num_paths);
  env.ris_arrival = sample_angles(rng, params.num_paths);
  for (int k = 0; k < params.num_users; ++k) {
    env.ue_departure.push_back(sample_angles(rng, params.num_paths));
  }
  env.prm_bs_ris =
      sample_prm(rng, params.num_paths, params.rician_kappa,
                 path_loss_gain(params.pathloss_gamma0_db, params.pathloss_alpha,
                                params.bs_ris_distance));
  for (int k = 0; k < params.num_users; ++k) {
    const double d = std::max(env.ue_positions[k].norm(), params.min_ue_distance);
    env.prm_ris_ue.push_back(
        sample_prm(rng, params.num_paths, params.rician_kappa,
                   path_loss_gain(params.pathloss_gamma0_db, params.pathloss_alpha, d)));
  }
  return env;
}

Eigen::VectorXcd frv(const Vec2& position, const PathAngles& angles, double wavelength) {
  const double k0 = 2.0 * kPi / wavelength;
  const Eigen::MatrixX2d proj = angles.projections();
  Eigen::VectorXcd out(proj.rows());
  for (Eigen::Index p = 0; p < proj.rows(); ++p) {
    out(p) = std::polar(1.0, k0 * proj.row(p).dot(position));
  }
  return out;
}

Eigen::MatrixXcd frm(std::span<const Vec2> positions, const PathAngles& angles,
                     double wavelength) {
  const double k0 = 2.0 * kPi / wavelength;
  const Eigen::MatrixX2d proj = angles.projections();
  Eigen::MatrixXcd out(proj.rows(), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const Eigen::VectorXd phase = k0 * (proj * positions[n]);
    for (Eigen::Index p = 0; p < proj.rows(); ++p) {
      out(p, static_cast<Eigen::Index>(n)) = std::polar(1.0, phase(p));
    }
  }
  return out;
}

Eigen::MatrixXcd frm_group(const Vec2& ref_point, std::span<const Vec2> offsets,
                           const PathAngles& angles, double wavelength) {
  std::vector<Vec2> pos;
  pos.reserve(offsets.size());
  for (const Vec2& o : offsets) pos.push_back(ref_point + o);
  return frm(pos, angles, wavelength);
}

namespace {

void check_dims(const SystemGeometry& geo, const PathEnvironment& env) {
  const auto lt = static_cast<Eigen::Index>(env.bs_departure.size());
  const auto lr = static_cast<Eigen::Index>(env.ris_arrival.size());
  if (env.prm_bs_ris.rows() != lr || env.prm_bs_ris.cols() != lt) {
    throw ConfigError("channel: BS-RIS PRM must be L_r x L_t");
  }
  if (env.ue_departure.size() != env.prm_ris_ue.size()) {
    throw ConfigError("channel: per-UE angles and PRMs disagree in count");
  }
  for (std::size_t k = 0; k < env.prm_ris_ue.size(); ++k) {
    if (env.prm_ris_ue[k].cols() != static_cast<Eigen::Index>(env.ue_departure[k].size())) {
      throw ConfigError("channel: RIS-UE PRM columns must match the UE path count");
    }
  }
  if (geo.group_refs.empty() || geo.intra_group_offsets.empty() || geo.bs_positions.empty()) {
    throw ConfigError("channel: empty geometry");
  }
}

void check_ue(const PathEnvironment& env, int ue) {
  if (ue < 0 || ue >= env.num_users()) throw ConfigError("channel: UE index out of range");
}

}  // namespace

Eigen::MatrixXcd bs_ris_group_block(const SystemGeometry& geo, const PathEnvironment& env,
                                    int group) {
  check_dims(geo, env);
  const Eigen::MatrixXcd f =
      frm_group(geo.group_refs.at(group), geo.intra_group_offsets, env.ris_arrival,
                geo.wavelength);
  const Eigen::MatrixXcd g = frm(geo.bs_positions, env.bs_departure, geo.wavelength);
  return f.adjoint() * env.prm_bs_ris * g;
}

Eigen::VectorXcd ris_ue_group_block(const SystemGeometry& geo, const PathEnvironment& env,
                                    int ue, int group) {
  check_dims(geo, env);
  check_ue(env, ue);
  const Eigen::MatrixXcd gk = frm_group(geo.group_refs.at(group), geo.intra_group_offsets,
                                        env.ue_departure[ue], geo.wavelength);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(env.prm_ris_ue[ue].rows());
  return gk.adjoint() * (env.prm_ris_ue[ue].adjoint() * ones);
}

Eigen::MatrixXcd assemble_bs_ris_channel(const SystemGeometry& geo, const PathEnvironment& env) {
  check_dims(geo, env);
  const int ne = geo.group_size();
  const Eigen::MatrixXcd sg =
      env.prm_bs_ris * frm(geo.bs_positions, env.bs_departure, geo.wavelength);
  Eigen::MatrixXcd h(geo.num_elements(), geo.num_bs_antennas());
  for (int g = 0; g < geo.num_groups(); ++g) {
    const Eigen::MatrixXcd f =
        frm_group(geo.group_refs[g], geo.intra_group_offsets, env.ris_arrival, geo.wavelength);
    h.middleRows(g * ne, ne) = f.adjoint() * sg;
  }
  return h;
}

Eigen::VectorXcd assemble_ris_ue_channel(const SystemGeometry& geo, const PathEnvironment& env,
                                         int ue) {
  check_dims(geo, env);
  check_ue(env, ue);
  const int ne = geo.group_size();
  const Eigen::VectorXcd s1 =
      env.prm_ris_ue[ue].adjoint() * Eigen::VectorXcd::Ones(env.prm_ris_ue[ue].rows());
  Eigen::VectorXcd h(geo.num_elements());
  for (int g = 0; g < geo.num_groups(); ++g) {
    const Eigen::MatrixXcd gk = frm_group(geo.group_refs[g], geo.intra_group_offsets,
                                          env.ue_departure[ue], geo.wavelength);
    h.segment(g * ne, ne) = gk.adjoint() * s1;
  }
  return h;
}

ChannelSet build_channels(const SystemGeometry& geo, const PathEnvironment& env,
                          double noise_power) {
  ChannelSet ch;
  ch.bs_ris = assemble_bs_ris_channel(geo, env);
  ch.ris_ue.resize(geo.num_elements(), env.num_users());
  for (int k = 0; k < env.num_users(); ++k) ch.ris_ue.col(k) = assemble_ris_ue_channel(geo, env, k);
  ch.noise_power = noise_power;
  return ch;
}

ChannelSet Scenario::channels_at(const std::vector<Vec2>& refs) const {
  SystemGeometry moved = geometry;
  moved.group_refs = refs;
  return build_channels(moved, env, noise_power);
}

}  // namespace mabdris
