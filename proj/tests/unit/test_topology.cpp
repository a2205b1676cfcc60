#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rislab/rng.hpp"
#include "rislab/topology.hpp"
#include "rislab/units.hpp"

using namespace rislab;

TEST_CASE("path loss from an AP to a user at the disc centre") {
  const double d = std::sqrt(75.0 * 75.0 + 800.0 * 800.0 + 8.0 * 8.0);
  CHECK(distance({0.0, -800.0, 8.0}, {75.0, 0.0, 0.0}) == doctest::Approx(d).epsilon(1e-15));
  CHECK(path_loss(d, 4.0) == doctest::Approx(1e-3 * std::pow(d, -4.0)).epsilon(1e-14));
}

TEST_CASE("zero exponent gives exactly 1e-3") {
  CHECK(path_loss(123.4, 0.0) == 1e-3);
  CHECK(path_loss(0.01, 0.0) == 1e-3);
}

TEST_CASE("path loss rejects zero distance and decreases with distance") {
  CHECK_THROWS_AS(path_loss(0.0, 2.0), std::invalid_argument);
  double prev = path_loss(1.0, 2.5);
  for (double d = 2.0; d < 1000.0; d *= 1.7) {
    const double cur = path_loss(d, 2.5);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("baseline configuration") {
  const ScenarioConfig cfg = default_paper_scenario();
  CHECK(cfg.elements_per_ris == 49);
  CHECK(cfg.antennas_per_ap == 9);
  CHECK(cfg.ap_positions.size() == 3);
  CHECK(cfg.ris_positions.size() == 2);
  CHECK(cfg.num_users == 4);
  const TransmitConfig tx = cfg.transmit();
  CHECK(tx.noise == doctest::Approx(3.981071705534973e-14).epsilon(1e-12));
  CHECK(tx.power.size() == 4);
  CHECK(tx.power[0] == doctest::Approx(1.0));

  const Scenario sc = build_scenario(cfg);
  for (const Vec3& u : sc.topology.user_positions) {
    CHECK(std::hypot(u.x - 75.0, u.y) <= 3.0);
    CHECK(u.z == 0.0);
  }
}

TEST_CASE("same seed rebuilds identical statistics") {
  const ScenarioConfig cfg = default_paper_scenario();
  const Scenario a = build_scenario(cfg, 42);
  const Scenario b = build_scenario(cfg, 42);
  CHECK(a.topology.user_positions == b.topology.user_positions);
  CHECK(a.stats.user_ris_gain == b.stats.user_ris_gain);
  CHECK(a.stats.user_ap_gain == b.stats.user_ap_gain);
  CHECK(a.stats.user_ris_arrival == b.stats.user_ris_arrival);
  CHECK(a.stats.ris_ap_departure == b.stats.ris_ap_departure);
  CHECK(a.stats.ap_arrival == b.stats.ap_arrival);
}

TEST_CASE("a new seed moves users and angles but not the fixed geometry") {
  const ScenarioConfig cfg = default_paper_scenario();
  const Scenario a = build_scenario(cfg, 1);
  const Scenario b = build_scenario(cfg, 2);
  CHECK(a.topology.ap_positions == b.topology.ap_positions);
  CHECK(a.topology.ris_positions == b.topology.ris_positions);
  CHECK(a.stats.ris_ap_gain == b.stats.ris_ap_gain);
  CHECK_FALSE(a.topology.user_positions == b.topology.user_positions);
  CHECK_FALSE(a.stats.user_ris_arrival == b.stats.user_ris_arrival);
}

TEST_CASE("angles lie in [0, 2pi)") {
  const Scenario sc = build_scenario(default_paper_scenario(), 9);
  for (const auto* g : {&sc.stats.user_ris_arrival, &sc.stats.ris_ap_departure, &sc.stats.ap_arrival}) {
    for (const Angles& a : g->values()) {
      CHECK(a.azimuth >= 0.0);
      CHECK(a.azimuth < two_pi);
      CHECK(a.elevation >= 0.0);
      CHECK(a.elevation < two_pi);
    }
  }
}

TEST_CASE("non-square arrays are rejected") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.elements_per_ris = 48;
  CHECK_THROWS_AS(build_scenario(cfg), std::invalid_argument);
  cfg = default_paper_scenario();
  cfg.antennas_per_ap = 8;
  CHECK_THROWS_AS(build_scenario(cfg), std::invalid_argument);
  CHECK(is_perfect_square(49));
  CHECK_FALSE(is_perfect_square(50));
  CHECK(exact_sqrt(1024) == 32);
  CHECK_THROWS_AS(exact_sqrt(3), std::invalid_argument);
}

TEST_CASE("coincident user and AP are rejected") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.user_positions = {cfg.ap_positions[0]};
  cfg.num_users = 1;
  CHECK_THROWS_AS(build_scenario(cfg), std::invalid_argument);
}

TEST_CASE("scenario without any RIS builds") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.ris_positions.clear();
  const Scenario sc = build_scenario(cfg);
  CHECK(sc.topology.num_ris() == 0);
  CHECK(sc.stats.user_ris_gain.rows() == 0);
}

TEST_CASE("extend_positions repeats the list with a shift") {
  const std::vector<Vec3> base = {{0.0, 1.0, 2.0}, {10.0, 1.0, 2.0}};
  const auto out = extend_positions(base, 5);
  REQUIRE(out.size() == 5);
  CHECK(out[1] == base[1]);
  CHECK(out[2] == Vec3{60.0, 1.0, 2.0});
  CHECK(out[4] == Vec3{120.0, 1.0, 2.0});
  CHECK(extend_positions(base, 1).size() == 1);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3));
  CHECK(watt_to_dbm(dbm_to_watt(-104.0)) == doctest::Approx(-104.0));
  CHECK(wrap_angle(-1.0) == doctest::Approx(two_pi - 1.0));
  CHECK(wrap_angle(two_pi) == 0.0);
}

TEST_CASE("transmit config validation and scaling") {
  TransmitConfig tx{{1.0, 2.0}, 1e-3};
  CHECK_NOTHROW(tx.validate(2));
  CHECK_THROWS_AS(tx.validate(3), std::invalid_argument);
  const TransmitConfig s = tx.scaled(10.0);
  CHECK(s.power[1] == doctest::Approx(20.0));
  CHECK(s.noise == doctest::Approx(1e-2));
  TransmitConfig bad{{0.0}, 1.0};
  CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
}
