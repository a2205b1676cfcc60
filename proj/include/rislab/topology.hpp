#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rislab/grid.hpp"

namespace rislab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b) noexcept;

/// Geometry and array dimensions of a deployment.
struct Topology {
  std::vector<Vec3> ap_positions;
  std::vector<Vec3> ris_positions;
  std::vector<Vec3> user_positions;
  std::size_t antennas_per_ap = 1;
  std::size_t elements_per_ris = 1;

  [[nodiscard]] std::size_t num_aps() const noexcept { return ap_positions.size(); }
  [[nodiscard]] std::size_t num_ris() const noexcept { return ris_positions.size(); }
  [[nodiscard]] std::size_t num_users() const noexcept { return user_positions.size(); }

  /// Throws std::invalid_argument on empty AP/user sets or non-square arrays.
  void validate() const;
};

struct Angles {
  double azimuth = 0.0;
  double elevation = 0.0;
  bool operator==(const Angles&) const = default;
};

/// Statistical CSI. Gains are linear power path losses.
struct ChannelStats {
  Grid<double> user_ris_gain;      // alpha, N x K
  Grid<double> ris_ap_gain;        // beta, M x N
  Grid<double> user_ap_gain;       // gamma, M x K
  Grid<double> ris_ap_rician;      // delta, M x N
  Grid<double> user_ris_rician;    // eps, N x K
  Grid<Angles> user_ris_arrival;   // at RIS n from user k, N x K
  Grid<Angles> ris_ap_departure;   // from RIS n towards AP m, M x N
  Grid<Angles> ap_arrival;         // at AP m from RIS n, M x N
  double spacing_ratio = 0.5;
  /// Cascaded links are LoS only (both Rician factors infinite).
  bool pure_los = false;

  void validate(const Topology& topo) const;
};

/// Per-user transmit powers and receiver noise, in watts.
struct TransmitConfig {
  std::vector<double> power;
  double noise = 0.0;

  void validate(std::size_t num_users) const;
  [[nodiscard]] TransmitConfig scaled(double factor) const;
};

struct PathLossExponents {
  double user_ris = 2.0;
  double ris_ap = 2.5;
  double user_ap = 4.0;
};

struct UserDisc {
  double center_x = 75.0;
  double center_y = 0.0;
  double radius = 3.0;
  double height = 0.0;
};

struct ScenarioConfig {
  std::vector<Vec3> ap_positions;
  std::vector<Vec3> ris_positions;
  /// Explicit user positions; when empty users are drawn in the disc.
  std::vector<Vec3> user_positions;
  UserDisc user_disc;
  std::size_t num_users = 4;
  std::size_t antennas_per_ap = 9;
  std::size_t elements_per_ris = 49;
  PathLossExponents exponents;
  double ris_ap_rician = 1.0;
  double user_ris_rician = 10.0;
  bool pure_los = false;
  double spacing_ratio = 0.5;
  double transmit_power_dbm = 30.0;
  /// Optional per-user override of transmit_power_dbm.
  std::vector<double> user_power_dbm;
  double noise_power_dbm = -104.0;
  std::uint64_t seed = 1;

  [[nodiscard]] TransmitConfig transmit() const;
};

struct Scenario {
  Topology topology;
  ChannelStats stats;
};

/// Baseline deployment: 3 APs, 2 RISs, 4 users in a 3 m disc.
ScenarioConfig default_paper_scenario();

/// Draws users (if needed) and angles from labeled substreams of seed.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);
Scenario build_scenario(const ScenarioConfig& config);

/// Resizes the AP or RIS list to count; extra nodes repeat the listed
/// ones shifted along x by a whole multiple of the span of the list.
std::vector<Vec3> extend_positions(const std::vector<Vec3>& base, std::size_t count);

double path_loss(double distance_m, double exponent);

bool is_perfect_square(std::size_t x) noexcept;
std::size_t exact_sqrt(std::size_t x);

}  // namespace rislab
