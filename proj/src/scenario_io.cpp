#include "rislab/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rislab {

using nlohmann::json;

EnergyModel EnergySettings::model(const Topology& topo) const {
  return EnergyModel::uniform(topo, efficiency, circuit_dbm, antenna_dbm, fronthaul_fixed_dbm,
                              fronthaul_traffic_dbm_per_gbps, element_dbm, bandwidth_hz);
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 to_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("positions must be [x, y, z] triples");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json from_vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void read_positions(const json& j, const char* key, std::vector<Vec3>& out) {
  if (!j.contains(key)) return;
  out.clear();
  for (const json& p : j.at(key)) out.push_back(to_vec(p));
}

json write_positions(const std::vector<Vec3>& v) {
  json out = json::array();
  for (const Vec3& p : v) out.push_back(from_vec(p));
  return out;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed scenario JSON: ") + e.what());
  }
  ScenarioFile file;
  file.scenario = default_paper_scenario();
  ScenarioConfig& s = file.scenario;
  try {
    reject_unknown(j,
                   {"aps", "ris", "users", "user_disc", "num_users", "antennas_per_ap", "elements_per_ris",
                    "path_loss_exponents", "rician", "pure_los", "spacing_ratio", "transmit_power_dbm",
                    "user_power_dbm", "noise_power_dbm", "seed", "energy"},
                   "scenario");
    read_positions(j, "aps", s.ap_positions);
    read_positions(j, "ris", s.ris_positions);
    read_positions(j, "users", s.user_positions);
    if (j.contains("user_disc")) {
      const json& d = j.at("user_disc");
      reject_unknown(d, {"center_x", "center_y", "radius", "height"}, "user_disc");
      read(d, "center_x", s.user_disc.center_x);
      read(d, "center_y", s.user_disc.center_y);
      read(d, "radius", s.user_disc.radius);
      read(d, "height", s.user_disc.height);
    }
    read(j, "num_users", s.num_users);
    read(j, "antennas_per_ap", s.antennas_per_ap);
    read(j, "elements_per_ris", s.elements_per_ris);
    if (j.contains("path_loss_exponents")) {
      const json& e = j.at("path_loss_exponents");
      reject_unknown(e, {"user_ris", "ris_ap", "user_ap"}, "path_loss_exponents");
      read(e, "user_ris", s.exponents.user_ris);
      read(e, "ris_ap", s.exponents.ris_ap);
      read(e, "user_ap", s.exponents.user_ap);
    }
    if (j.contains("rician")) {
      const json& r = j.at("rician");
      reject_unknown(r, {"ris_ap", "user_ris"}, "rician");
      read(r, "ris_ap", s.ris_ap_rician);
      read(r, "user_ris", s.user_ris_rician);
    }
    read(j, "pure_los", s.pure_los);
    read(j, "spacing_ratio", s.spacing_ratio);
    read(j, "transmit_power_dbm", s.transmit_power_dbm);
    read(j, "user_power_dbm", s.user_power_dbm);
    read(j, "noise_power_dbm", s.noise_power_dbm);
    read(j, "seed", s.seed);
    if (j.contains("energy")) {
      const json& e = j.at("energy");
      reject_unknown(e,
                     {"efficiency", "circuit_dbm", "antenna_dbm", "fronthaul_fixed_dbm",
                      "fronthaul_traffic_dbm_per_gbps", "element_dbm", "bandwidth_hz"},
                     "energy");
      EnergySettings& en = file.energy;
      read(e, "efficiency", en.efficiency);
      read(e, "circuit_dbm", en.circuit_dbm);
      read(e, "antenna_dbm", en.antenna_dbm);
      read(e, "fronthaul_fixed_dbm", en.fronthaul_fixed_dbm);
      read(e, "fronthaul_traffic_dbm_per_gbps", en.fronthaul_traffic_dbm_per_gbps);
      read(e, "element_dbm", en.element_dbm);
      read(e, "bandwidth_hz", en.bandwidth_hz);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario: ") + e.what());
  }
  if (!s.user_positions.empty()) s.num_users = s.user_positions.size();
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string scenario_to_json(const ScenarioFile& file, int indent) {
  const ScenarioConfig& s = file.scenario;
  const EnergySettings& e = file.energy;
  json j;
  j["aps"] = write_positions(s.ap_positions);
  j["ris"] = write_positions(s.ris_positions);
  if (!s.user_positions.empty()) j["users"] = write_positions(s.user_positions);
  j["user_disc"] = {{"center_x", s.user_disc.center_x},
                    {"center_y", s.user_disc.center_y},
                    {"radius", s.user_disc.radius},
                    {"height", s.user_disc.height}};
  j["num_users"] = s.num_users;
  j["antennas_per_ap"] = s.antennas_per_ap;
  j["elements_per_ris"] = s.elements_per_ris;
  j["path_loss_exponents"] = {
      {"user_ris", s.exponents.user_ris}, {"ris_ap", s.exponents.ris_ap}, {"user_ap", s.exponents.user_ap}};
  j["rician"] = {{"ris_ap", s.ris_ap_rician}, {"user_ris", s.user_ris_rician}};
  j["pure_los"] = s.pure_los;
  j["spacing_ratio"] = s.spacing_ratio;
  j["transmit_power_dbm"] = s.transmit_power_dbm;
  if (!s.user_power_dbm.empty()) j["user_power_dbm"] = s.user_power_dbm;
  j["noise_power_dbm"] = s.noise_power_dbm;
  j["seed"] = s.seed;
  j["energy"] = {{"efficiency", e.efficiency},
                 {"circuit_dbm", e.circuit_dbm},
                 {"antenna_dbm", e.antenna_dbm},
                 {"fronthaul_fixed_dbm", e.fronthaul_fixed_dbm},
                 {"fronthaul_traffic_dbm_per_gbps", e.fronthaul_traffic_dbm_per_gbps},
                 {"element_dbm", e.element_dbm},
                 {"bandwidth_hz", e.bandwidth_hz}};
  return j.dump(indent);
}

}  // namespace rislab
