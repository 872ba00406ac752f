#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mabdris/types.hpp"

namespace mabdris {

/// Azimuth/elevation pairs of the propagation paths seen by one array.
struct PathAngles {
  std::vector<double> azimuth;
  std::vector<double> elevation;

  std::size_t size() const { return azimuth.size(); }

  /// Row p holds (sin(az) cos(el), sin(el)); the phase of path p at position t
  /// is (2 pi / lambda) * row_p . t.
  Eigen::MatrixX2d projections() const;
};

struct Rect {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol && p.y() >= lo.y() - tol &&
           p.y() <= hi.y() + tol;
  }
  Vec2 clamp(const Vec2& p) const { return p.cwiseMax(lo).cwiseMin(hi); }
};

/// Positions of every radiating element plus the movement constraints.
struct SystemGeometry {
  std::vector<Vec2> bs_positions;
  std::vector<Vec2> group_refs;
  // Shared by every group; element m of group g sits at group_refs[g] + intra_group_offsets[m].
  std::vector<Vec2> intra_group_offsets;
  std::vector<Vec2> ue_positions;
  Rect region;
  double min_spacing = 0.0;
  double wavelength = 0.01;
  double bs_ris_distance = 50.0;
  double ris_ue_radius = 2.0;

  int num_groups() const { return static_cast<int>(group_refs.size()); }
  int group_size() const { return static_cast<int>(intra_group_offsets.size()); }
  int num_elements() const { return num_groups() * group_size(); }
  int num_bs_antennas() const { return static_cast<int>(bs_positions.size()); }

  /// Region for reference points such that every element of the group stays inside `region`.
  Rect reference_box() const;

  /// Throws ConfigError when an element leaves the region or two groups are closer than
  /// min_spacing.
  void validate(double tol = 1e-12) const;
};

struct GeometryParams {
  int num_elements = 16;
  int group_size = 1;
  int num_bs_antennas = 4;
  double scale_factor = 1.2;   // l_s
  double wavelength = 0.01;
  double region_width_wavelengths = 4.0;
  double bs_ris_distance = 50.0;
  double ris_ue_radius = 2.0;
  std::optional<double> min_spacing;  // defaults to group_size * wavelength / 2
};

/// Builds the fixed-antenna layout: a half-wavelength ULA at the BS, groups of a
/// half-wavelength linear sub-array abutting from the region's left edge on y = 0.
/// The region is [0, l_s (M-1) lambda/2] x [-w/2, w/2].
SystemGeometry make_geometry(const GeometryParams& params, std::vector<Vec2> ue_positions);

struct PathEnvironment {
  PathAngles bs_departure;               // L_t paths leaving the BS
  PathAngles ris_arrival;                // L_r paths arriving at the RIS
  std::vector<PathAngles> ue_departure;  // per UE, L_t paths leaving the RIS
  Eigen::MatrixXcd prm_bs_ris;           // L_r x L_t, includes sqrt(path loss)
  std::vector<Eigen::MatrixXcd> prm_ris_ue;
  std::vector<Vec2> ue_positions;  // relative to the RIS origin, used for path loss

  int num_users() const { return static_cast<int>(prm_ris_ue.size()); }
};

struct EnvironmentParams {
  int num_users = 2;
  int num_paths = 6;
  double rician_kappa = 1.0;
  double pathloss_gamma0_db = -30.0;
  double pathloss_alpha = 2.2;
  double bs_ris_distance = 50.0;
  double ris_ue_radius = 2.0;
  double min_ue_distance = 0.5;
};

/// eta(d) = gamma0 * d^-alpha with gamma0 given in dB.
double path_loss_gain(double gamma0_db, double alpha, double distance);

/// Draws UE positions, path angles (uniform on [-pi/2, pi/2]) and diagonal
/// Rician PRMs. Deterministic in `seed`. With a single path all power goes to
/// the LoS entry.
PathEnvironment sample_environment(const EnvironmentParams& params, std::uint64_t seed);

/// Field-response vector at `position`: entry p is exp(j 2pi/lambda rho_p(position)).
Eigen::VectorXcd frv(const Vec2& position, const PathAngles& angles, double wavelength);

/// L x N matrix whose column n is frv(positions[n]).
Eigen::MatrixXcd frm(std::span<const Vec2> positions, const PathAngles& angles,
                     double wavelength);

/// Receive-region FRM of one group located at `ref_point`.
Eigen::MatrixXcd frm_group(const Vec2& ref_point, std::span<const Vec2> offsets,
                           const PathAngles& angles, double wavelength);

/// N_E x N_t block F^H(c_g) Sigma_br G(b).
Eigen::MatrixXcd bs_ris_group_block(const SystemGeometry& geometry, const PathEnvironment& env,
                                    int group);
/// N_E block G_k(c_g)^H Sigma_k^H 1.
Eigen::VectorXcd ris_ue_group_block(const SystemGeometry& geometry, const PathEnvironment& env,
                                    int ue, int group);

Eigen::MatrixXcd assemble_bs_ris_channel(const SystemGeometry& geometry,
                                         const PathEnvironment& env);
Eigen::VectorXcd assemble_ris_ue_channel(const SystemGeometry& geometry,
                                         const PathEnvironment& env, int ue);

struct ChannelSet {
  Eigen::MatrixXcd bs_ris;  // H, M x N_t
  Eigen::MatrixXcd ris_ue;  // H_U, M x K; column k is h_k
  double noise_power = 1.0;

  int num_elements() const { return static_cast<int>(bs_ris.rows()); }
  int num_bs_antennas() const { return static_cast<int>(bs_ris.cols()); }
  int num_users() const { return static_cast<int>(ris_ue.cols()); }
};

ChannelSet build_channels(const SystemGeometry& geometry, const PathEnvironment& env,
                          double noise_power);

/// Geometry + environment of one Monte-Carlo draw. Channels are rebuilt from it
/// whenever the reference points move.
struct Scenario {
  SystemGeometry geometry;
  PathEnvironment env;
  double noise_power = 1e-11;

  ChannelSet channels() const { return build_channels(geometry, env, noise_power); }
  ChannelSet channels_at(const std::vector<Vec2>& refs) const;
};

}  // namespace mabdris
