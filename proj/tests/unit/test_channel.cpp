#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../support.hpp"
#include "rislab/channel.hpp"

using namespace rislab;
using rislab::testing::random_scenario;

TEST_CASE("array response of a 2x2 array broadside") {
  const CVector a = array_response(4, std::numbers::pi / 2, std::numbers::pi / 2, 0.5);
  REQUIRE(a.size() == 4);
  CHECK(std::abs(a(0) - cdouble(1, 0)) < 1e-12);
  CHECK(std::abs(a(1) - cdouble(1, 0)) < 1e-12);
  CHECK(std::abs(a(2) - cdouble(-1, 0)) < 1e-12);
  CHECK(std::abs(a(3) - cdouble(-1, 0)) < 1e-12);
}

TEST_CASE("array response with zero phase progression is all ones") {
  // sin(e) sin(a) = 0 and cos(e) = 0
  const CVector a = array_response(9, 0.0, std::numbers::pi / 2, 0.5);
  for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(a(i) - cdouble(1, 0)) < 1e-12);
}

TEST_CASE("array response entries have unit modulus") {
  Rng rng = make_stream(5, "t");
  for (int trial = 0; trial < 20; ++trial) {
    const CVector a = array_response(49, uniform_angle(rng), uniform_angle(rng), 0.5);
    CHECK(a.squaredNorm() == doctest::Approx(49.0));
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(a(i)) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(array_response(8, 0.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("LoS components are rank one with unit leading entry") {
  Rng rng = make_stream(11, "t");
  const Scenario sc = random_scenario(rng, {2, 2, 3, 4, 9});
  const LosComponents los = los_components(sc.topology, sc.stats);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const CMatrix z = los.ris_ap_block(m, n);
      CHECK(std::abs(z(0, 0) - cdouble(1, 0)) < 1e-12);
      CHECK((z.adjoint() * z).trace().real() == doctest::Approx(4.0 * 9.0));
      // each column is a multiple of the AP-side factor
      const CVector& a = los.ap_side(m, n);
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const cdouble s = z(0, c) / a(0);
        CHECK((z.col(c) - s * a).norm() < 1e-12);
      }
    }
  }
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(los.user_ris(n, k).squaredNorm() == doctest::Approx(9.0));
  }
}

TEST_CASE("pure LoS realization equals the LoS part") {
  Rng rng = make_stream(12, "t");
  Scenario sc = random_scenario(rng, {1, 2, 2, 4, 4});
  sc.stats.pure_los = true;
  for (auto& g : sc.stats.user_ap_gain.values()) g = 0.0;
  const ChannelSampler sampler(sc.topology, sc.stats);
  Rng draw = make_stream(1, "mc", 0);
  const ChannelRealization real = sampler.sample(draw);
  const LosComponents& los = sampler.los();
  CMatrix user_want = los.stacked_user_ris();
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t k = 0; k < 2; ++k) {
      user_want.block(static_cast<Eigen::Index>(n * 4), static_cast<Eigen::Index>(k), 4, 1) *=
          std::sqrt(sc.stats.user_ris_gain(n, k));
    }
  }
  CHECK((real.user_ris - user_want).norm() < 1e-12 * user_want.norm());
  for (std::size_t n = 0; n < 2; ++n) {
    const CMatrix block = real.ris_ap.block(0, static_cast<Eigen::Index>(n * 4), 4, 4);
    const CMatrix want = std::sqrt(sc.stats.ris_ap_gain(0, n)) * los.ris_ap_block(0, n);
    CHECK((block - want).norm() < 1e-12 * (1.0 + want.norm()));
  }
  CHECK(real.direct.norm() == 0.0);
}

TEST_CASE("sampled scatter has unit variance and direct link power gamma M_b") {
  Rng rng = make_stream(13, "t");
  Scenario sc = random_scenario(rng, {1, 1, 1, 4, 1});
  sc.stats.user_ris_rician(0, 0) = 0.0;
  sc.stats.user_ris_gain(0, 0) = 1.0;
  sc.stats.user_ap_gain(0, 0) = 2.0;
  const ChannelSampler sampler(sc.topology, sc.stats);
  double h2 = 0.0;
  double d2 = 0.0;
  double h_re = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    Rng r = make_stream(2, "mc", static_cast<std::uint64_t>(t));
    const ChannelRealization real = sampler.sample(r);
    h2 += std::norm(real.user_ris(0, 0));
    h_re += real.user_ris(0, 0).real();
    d2 += real.direct.col(0).squaredNorm();
  }
  CHECK(h2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(h_re / n) < 3.0 * std::sqrt(0.5 / n));
  CHECK(d2 / n == doctest::Approx(2.0 * 4.0).epsilon(0.02));
}

TEST_CASE("cascaded channel with zero phases is Z H") {
  Rng rng = make_stream(14, "t");
  const Scenario sc = random_scenario(rng, {2, 2, 3, 4, 9});
  Rng draw = make_stream(3, "mc", 0);
  const ChannelRealization real = sample_realization(sc.topology, sc.stats, draw);
  const PhaseConfig zero(2, 9);
  CHECK((cascaded_channel(real.ris_ap, zero, real.user_ris) - real.ris_ap * real.user_ris).norm() <
        1e-12 * (real.ris_ap * real.user_ris).norm());
}

TEST_CASE("cascaded channel is 2pi periodic and matches the explicit diagonal") {
  Rng rng = make_stream(15, "t");
  const Scenario sc = random_scenario(rng, {2, 2, 3, 4, 9});
  Rng draw = make_stream(3, "mc", 1);
  const ChannelRealization real = sample_realization(sc.topology, sc.stats, draw);
  std::vector<double> theta(18);
  std::vector<double> shifted(18);
  CVector diag(18);
  for (std::size_t i = 0; i < 18; ++i) {
    theta[i] = uniform_angle(rng);
    shifted[i] = theta[i] + two_pi;
    diag(static_cast<Eigen::Index>(i)) = std::polar(1.0, theta[i]);
  }
  const CMatrix g1 = cascaded_channel(real.ris_ap, PhaseConfig(2, 9, theta), real.user_ris);
  const CMatrix g2 = cascaded_channel(real.ris_ap, PhaseConfig(2, 9, shifted), real.user_ris);
  const CMatrix g3 = real.ris_ap * diag.asDiagonal() * real.user_ris;
  CHECK((g1 - g2).norm() < 1e-12 * g1.norm());
  CHECK((g1 - g3).norm() < 1e-12 * g1.norm());
  CHECK_THROWS_AS(cascaded_channel(real.ris_ap, PhaseConfig(1, 9), real.user_ris), std::invalid_argument);
}

TEST_CASE("scalar cascade") {
  CMatrix z(1, 1);
  CMatrix h(1, 1);
  z(0, 0) = cdouble(0.3, -0.2);
  h(0, 0) = cdouble(-1.1, 0.4);
  const std::vector<double> theta = {0.7};
  const CMatrix g = cascaded_channel(z, PhaseConfig(1, 1, theta), h);
  CHECK(std::abs(g(0, 0) - z(0, 0) * std::polar(1.0, 0.7) * h(0, 0)) < 1e-15);
}

TEST_CASE("sampling is deterministic per stream") {
  Rng rng = make_stream(16, "t");
  const Scenario sc = random_scenario(rng, {2, 1, 2, 4, 4});
  Rng a = make_stream(5, "mc", 9);
  Rng b = make_stream(5, "mc", 9);
  const ChannelRealization ra = sample_realization(sc.topology, sc.stats, a);
  const ChannelRealization rb = sample_realization(sc.topology, sc.stats, b);
  CHECK(ra.direct == rb.direct);
  CHECK(ra.user_ris == rb.user_ris);
  CHECK(ra.ris_ap == rb.ris_ap);
}

TEST_CASE("binary realization dump round trips") {
  Rng rng = make_stream(17, "t");
  const Scenario sc = random_scenario(rng, {2, 2, 3, 4, 9});
  Rng draw = make_stream(1, "mc", 2);
  const ChannelRealization real = sample_realization(sc.topology, sc.stats, draw);
  std::stringstream buf;
  write_realization(buf, dims_of(sc.topology), real);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 16 + 16 * (8 * 3 + 18 * 3 + 8 * 18));
  ChannelDims dims;
  const ChannelRealization back = read_realization(buf, &dims);
  CHECK(dims == dims_of(sc.topology));
  CHECK(back.direct == real.direct);
  CHECK(back.user_ris == real.user_ris);
  CHECK(back.ris_ap == real.ris_ap);
  std::stringstream junk("not a realization at all");
  CHECK_THROWS(read_realization(junk));
}
