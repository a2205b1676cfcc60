#pragma once

#include <cmath>
#include <cstddef>
#include <random>

#include "rislab/rng.hpp"
#include "rislab/topology.hpp"
#include "rislab/units.hpp"

namespace rislab::testing {

struct RandomShape {
  std::size_t aps = 2;
  std::size_t ris = 2;
  std::size_t users = 3;
  std::size_t antennas = 4;
  std::size_t elements = 9;
};

/// Arbitrary valid statistics, not tied to any geometry.
inline Scenario random_scenario(Rng& rng, const RandomShape& shape) {
  Scenario sc;
  Topology& t = sc.topology;
  for (std::size_t m = 0; m < shape.aps; ++m) t.ap_positions.push_back({double(m), 0.0, 10.0});
  for (std::size_t n = 0; n < shape.ris; ++n) t.ris_positions.push_back({double(n), 5.0, 5.0});
  for (std::size_t k = 0; k < shape.users; ++k) t.user_positions.push_back({double(k), 20.0, 0.0});
  t.antennas_per_ap = shape.antennas;
  t.elements_per_ris = shape.elements;

  std::uniform_real_distribution<double> log_gain(-9.0, -6.0);
  std::uniform_real_distribution<double> factor(0.0, 8.0);
  auto gain = [&] { return std::pow(10.0, log_gain(rng)); };
  auto angles = [&](std::size_t r, std::size_t c) {
    Grid<Angles> g(r, c);
    for (auto& a : g.values()) a = {uniform_angle(rng), uniform_angle(rng)};
    return g;
  };
  const std::size_t M = shape.aps, N = shape.ris, K = shape.users;
  ChannelStats& s = sc.stats;
  s.user_ris_gain = Grid<double>(N, K);
  s.ris_ap_gain = Grid<double>(M, N);
  s.user_ap_gain = Grid<double>(M, K);
  s.ris_ap_rician = Grid<double>(M, N);
  s.user_ris_rician = Grid<double>(N, K);
  for (auto& v : s.user_ris_gain.values()) v = gain();
  for (auto& v : s.ris_ap_gain.values()) v = gain();
  for (auto& v : s.user_ap_gain.values()) v = gain() * 1e-3;
  for (auto& v : s.ris_ap_rician.values()) v = factor(rng);
  for (auto& v : s.user_ris_rician.values()) v = factor(rng);
  s.user_ris_arrival = angles(N, K);
  s.ris_ap_departure = angles(M, N);
  s.ap_arrival = angles(M, N);
  s.spacing_ratio = 0.5;
  return sc;
}

inline TransmitConfig uniform_tx(std::size_t users, double power_dbm, double noise_dbm = -104.0) {
  return {std::vector<double>(users, dbm_to_watt(power_dbm)), dbm_to_watt(noise_dbm)};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace rislab::testing
