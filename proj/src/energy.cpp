#include "rislab/energy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rislab/units.hpp"

namespace rislab {

namespace {

void check_size(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(std::string(what) + " has the wrong length");
  for (const double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

void EnergyModel::validate(const Topology& topo) const {
  check_size(amplifier_efficiency, topo.num_users(), "amplifier_efficiency");
  for (const double xi : amplifier_efficiency) {
    if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("amplifier efficiency must lie in (0, 1]");
  }
  check_size(circuit_power, topo.num_users(), "circuit_power");
  check_size(antenna_power, topo.num_aps(), "antenna_power");
  check_size(fronthaul_fixed, topo.num_aps(), "fronthaul_fixed");
  check_size(fronthaul_traffic, topo.num_aps(), "fronthaul_traffic");
  check_size(element_power, topo.num_ris(), "element_power");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw std::invalid_argument("bandwidth must be positive");
}

EnergyModel EnergyModel::uniform(const Topology& topo, double efficiency, double circuit_dbm, double antenna_dbm,
                                 double fronthaul_fixed_dbm, double fronthaul_traffic_dbm_per_gbps,
                                 double element_dbm, double bandwidth_hz) {
  EnergyModel e;
  e.amplifier_efficiency.assign(topo.num_users(), efficiency);
  e.circuit_power.assign(topo.num_users(), dbm_to_watt(circuit_dbm));
  e.antenna_power.assign(topo.num_aps(), dbm_to_watt(antenna_dbm));
  e.fronthaul_fixed.assign(topo.num_aps(), dbm_to_watt(fronthaul_fixed_dbm));
  e.fronthaul_traffic.assign(topo.num_aps(), dbm_to_watt(fronthaul_traffic_dbm_per_gbps) / 1e9);
  e.element_power.assign(topo.num_ris(), dbm_to_watt(element_dbm));
  e.bandwidth = bandwidth_hz;
  return e;
}

double total_power(const EnergyModel& model, const TransmitConfig& tx, std::span<const double> rates,
                   const Topology& topo, bool include_ris) {
  model.validate(topo);
  if (tx.power.size() != topo.num_users() || rates.size() != topo.num_users()) {
    throw std::invalid_argument("powers and rates must have one entry per user");
  }
  double sum_rate = 0.0;
  for (const double r : rates) {
    if (!std::isfinite(r)) throw std::invalid_argument("rates must be finite");
    sum_rate += r;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < topo.num_users(); ++k) {
    total += tx.power[k] / model.amplifier_efficiency[k] + model.circuit_power[k];
  }
  const double mb = static_cast<double>(topo.antennas_per_ap);
  for (std::size_t m = 0; m < topo.num_aps(); ++m) {
    total += mb * model.antenna_power[m] + model.fronthaul_fixed[m] +
             model.fronthaul_traffic[m] * model.bandwidth * sum_rate;
  }
  if (include_ris) {
    const double nr = static_cast<double>(topo.elements_per_ris);
    for (std::size_t n = 0; n < topo.num_ris(); ++n) total += nr * model.element_power[n];
  }
  return total;
}

double energy_efficiency(const EnergyModel& model, const TransmitConfig& tx, std::span<const double> rates,
                         const Topology& topo, bool include_ris) {
  const double power = total_power(model, tx, rates, topo, include_ris);
  const double sum_rate = std::accumulate(rates.begin(), rates.end(), 0.0);
  return model.bandwidth * sum_rate / power;
}

}  // namespace rislab
