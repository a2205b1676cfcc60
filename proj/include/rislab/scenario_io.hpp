#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rislab/energy.hpp"
#include "rislab/topology.hpp"

namespace rislab {

/// Inputs to EnergyModel::uniform, in the units a scenario file uses.
struct EnergySettings {
  double efficiency = 0.3;
  double circuit_dbm = 10.0;
  double antenna_dbm = 20.0;
  double fronthaul_fixed_dbm = 23.0;
  double fronthaul_traffic_dbm_per_gbps = 24.0;
  double element_dbm = 25.0;
  double bandwidth_hz = 20e6;

  [[nodiscard]] EnergyModel model(const Topology& topo) const;
};

struct ScenarioFile {
  ScenarioConfig scenario;
  EnergySettings energy;
};

/// Missing keys keep the baseline defaults; unknown keys are rejected.
ScenarioFile parse_scenario(std::string_view json_text);
ScenarioFile load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioFile& file, int indent = 2);

}  // namespace rislab
