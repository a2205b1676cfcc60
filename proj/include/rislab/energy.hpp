#pragma once

#include <span>
#include <vector>

#include "rislab/topology.hpp"

namespace rislab {

/// Power-consumption coefficients, all in watts unless noted.
struct EnergyModel {
  std::vector<double> amplifier_efficiency;  // per user, in (0, 1]
  std::vector<double> circuit_power;         // per user
  std::vector<double> antenna_power;         // per AP, per antenna
  std::vector<double> fronthaul_fixed;       // per AP
  std::vector<double> fronthaul_traffic;     // per AP, W per bit/s
  std::vector<double> element_power;         // per RIS, per element
  double bandwidth = 20e6;                   // Hz
  unsigned phase_bits = 0;                   // 0 for continuous phases

  void validate(const Topology& topo) const;

  /// Uniform coefficients sized for topo.
  static EnergyModel uniform(const Topology& topo, double efficiency = 0.3, double circuit_dbm = 10.0,
                             double antenna_dbm = 20.0, double fronthaul_fixed_dbm = 23.0,
                             double fronthaul_traffic_dbm_per_gbps = 24.0, double element_dbm = 25.0,
                             double bandwidth_hz = 20e6);
};

/// Total consumed power for the given per-user rates (bit/s/Hz).
double total_power(const EnergyModel& model, const TransmitConfig& tx, std::span<const double> rates,
                   const Topology& topo, bool include_ris);

/// W * sum(rates) / total_power, in bit/J.
double energy_efficiency(const EnergyModel& model, const TransmitConfig& tx, std::span<const double> rates,
                         const Topology& topo, bool include_ris);

}  // namespace rislab
