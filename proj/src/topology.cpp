#include "rislab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rislab/rng.hpp"
#include "rislab/units.hpp"

namespace rislab {

double distance(const Vec3& a, const Vec3& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

bool is_perfect_square(std::size_t x) noexcept {
  if (x == 0) return false;
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(x))));
  return r * r == x;
}

std::size_t exact_sqrt(std::size_t x) {
  if (!is_perfect_square(x)) {
    throw std::invalid_argument("array size " + std::to_string(x) + " is not a perfect square");
  }
  return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(x))));
}

void Topology::validate() const {
  if (ap_positions.empty()) throw std::invalid_argument("at least one AP is required");
  if (user_positions.empty()) throw std::invalid_argument("at least one user is required");
  exact_sqrt(antennas_per_ap);
  exact_sqrt(elements_per_ris);
}

namespace {

template <typename T>
void check_shape(const Grid<T>& g, std::size_t rows, std::size_t cols, const char* name) {
  if (g.rows() != rows || g.cols() != cols) {
    throw std::invalid_argument(std::string("statistics table ") + name + " has wrong shape");
  }
}

void check_nonnegative(const Grid<double>& g, const char* name) {
  for (const double v : g.values()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string("statistics table ") + name +
                                  " has a negative or non-finite entry");
    }
  }
}

void check_angles(const Grid<Angles>& g, const char* name) {
  for (const Angles& a : g.values()) {
    if (!(a.azimuth >= 0.0 && a.azimuth < two_pi && a.elevation >= 0.0 && a.elevation < two_pi)) {
      throw std::invalid_argument(std::string("angle table ") + name + " leaves [0, 2pi)");
    }
  }
}

}  // namespace

void ChannelStats::validate(const Topology& topo) const {
  const std::size_t m = topo.num_aps();
  const std::size_t n = topo.num_ris();
  const std::size_t k = topo.num_users();
  check_shape(user_ris_gain, n, k, "user_ris_gain");
  check_shape(ris_ap_gain, m, n, "ris_ap_gain");
  check_shape(user_ap_gain, m, k, "user_ap_gain");
  check_shape(ris_ap_rician, m, n, "ris_ap_rician");
  check_shape(user_ris_rician, n, k, "user_ris_rician");
  check_shape(user_ris_arrival, n, k, "user_ris_arrival");
  check_shape(ris_ap_departure, m, n, "ris_ap_departure");
  check_shape(ap_arrival, m, n, "ap_arrival");
  check_nonnegative(user_ris_gain, "user_ris_gain");
  check_nonnegative(ris_ap_gain, "ris_ap_gain");
  check_nonnegative(user_ap_gain, "user_ap_gain");
  check_nonnegative(ris_ap_rician, "ris_ap_rician");
  check_nonnegative(user_ris_rician, "user_ris_rician");
  check_angles(user_ris_arrival, "user_ris_arrival");
  check_angles(ris_ap_departure, "ris_ap_departure");
  check_angles(ap_arrival, "ap_arrival");
  if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio)) {
    throw std::invalid_argument("spacing ratio must be positive");
  }
}

void TransmitConfig::validate(std::size_t num_users) const {
  if (power.size() != num_users) throw std::invalid_argument("one transmit power per user is required");
  for (const double p : power) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("transmit powers must be positive");
  }
  if (!(noise > 0.0) || !std::isfinite(noise)) throw std::invalid_argument("noise power must be positive");
}

TransmitConfig TransmitConfig::scaled(double factor) const {
  TransmitConfig out = *this;
  for (double& p : out.power) p *= factor;
  out.noise *= factor;
  return out;
}

TransmitConfig ScenarioConfig::transmit() const {
  TransmitConfig tx;
  if (!user_power_dbm.empty()) {
    if (user_power_dbm.size() != num_users) {
      throw std::invalid_argument("user_power_dbm needs one entry per user");
    }
    for (const double dbm : user_power_dbm) tx.power.push_back(dbm_to_watt(dbm));
  } else {
    tx.power.assign(num_users, dbm_to_watt(transmit_power_dbm));
  }
  tx.noise = dbm_to_watt(noise_power_dbm);
  return tx;
}

ScenarioConfig default_paper_scenario() {
  ScenarioConfig cfg;
  cfg.ap_positions = {{0.0, -800.0, 8.0}, {75.0, -803.0, 8.0}, {150.0, -800.0, 8.0}};
  cfg.ris_positions = {{55.0, 20.0, 5.0}, {95.0, 20.0, 5.0}};
  return cfg;
}

std::vector<Vec3> extend_positions(const std::vector<Vec3>& base, std::size_t count) {
  if (count <= base.size()) return {base.begin(), base.begin() + static_cast<std::ptrdiff_t>(count)};
  if (base.empty()) throw std::invalid_argument("cannot extend an empty position list");
  const auto [lo, hi] = std::minmax_element(base.begin(), base.end(),
                                            [](const Vec3& a, const Vec3& b) { return a.x < b.x; });
  const double step = (hi->x - lo->x) + 50.0;
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    Vec3 p = base[j % base.size()];
    p.x += static_cast<double>(j / base.size()) * step;
    out.push_back(p);
  }
  return out;
}

double path_loss(double distance_m, double exponent) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("coincident positions give zero link distance");
  return 1e-3 * std::pow(distance_m, -exponent);
}

namespace {

Grid<Angles> draw_angles(std::size_t rows, std::size_t cols, Rng& rng) {
  Grid<Angles> g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      g(r, c).azimuth = uniform_angle(rng);
      g(r, c).elevation = uniform_angle(rng);
    }
  }
  return g;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  Scenario s;
  Topology& topo = s.topology;
  topo.ap_positions = config.ap_positions;
  topo.ris_positions = config.ris_positions;
  topo.antennas_per_ap = config.antennas_per_ap;
  topo.elements_per_ris = config.elements_per_ris;

  if (!config.user_positions.empty()) {
    if (config.user_positions.size() != config.num_users) {
      throw std::invalid_argument("user_positions must list num_users entries");
    }
    topo.user_positions = config.user_positions;
  } else {
    if (!(config.user_disc.radius >= 0.0)) throw std::invalid_argument("user disc radius must be >= 0");
    Rng rng = make_stream(seed, "users");
    for (std::size_t k = 0; k < config.num_users; ++k) {
      const double r = config.user_disc.radius * std::sqrt(uniform_unit(rng));
      const double phi = uniform_angle(rng);
      topo.user_positions.push_back({config.user_disc.center_x + r * std::cos(phi),
                                     config.user_disc.center_y + r * std::sin(phi),
                                     config.user_disc.height});
    }
  }
  topo.validate();

  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  if (!(config.ris_ap_rician >= 0.0) || !(config.user_ris_rician >= 0.0)) {
    throw std::invalid_argument("Rician factors must be >= 0");
  }

  ChannelStats& st = s.stats;
  st.user_ris_gain = Grid<double>(n_count, k_count);
  st.ris_ap_gain = Grid<double>(m_count, n_count);
  st.user_ap_gain = Grid<double>(m_count, k_count);
  st.ris_ap_rician = Grid<double>(m_count, n_count, config.ris_ap_rician);
  st.user_ris_rician = Grid<double>(n_count, k_count, config.user_ris_rician);
  for (std::size_t n = 0; n < n_count; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      st.user_ris_gain(n, k) = path_loss(distance(topo.ris_positions[n], topo.user_positions[k]),
                                         config.exponents.user_ris);
    }
  }
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t n = 0; n < n_count; ++n) {
      st.ris_ap_gain(m, n) = path_loss(distance(topo.ap_positions[m], topo.ris_positions[n]),
                                       config.exponents.ris_ap);
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      st.user_ap_gain(m, k) = path_loss(distance(topo.ap_positions[m], topo.user_positions[k]),
                                        config.exponents.user_ap);
    }
  }

  Rng rng = make_stream(seed, "angles");
  st.user_ris_arrival = draw_angles(n_count, k_count, rng);
  st.ris_ap_departure = draw_angles(m_count, n_count, rng);
  st.ap_arrival = draw_angles(m_count, n_count, rng);
  st.spacing_ratio = config.spacing_ratio;
  st.pure_los = config.pure_los;
  st.validate(topo);
  return s;
}

Scenario build_scenario(const ScenarioConfig& config) { return build_scenario(config, config.seed); }

}  // namespace rislab
