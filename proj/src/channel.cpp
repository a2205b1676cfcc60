#include "rislab/channel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "rislab/units.hpp"

namespace rislab {

CVector array_response(std::size_t count, double azimuth, double elevation, double spacing_ratio) {
  const std::size_t side = exact_sqrt(count);
  const double row_phase = std::sin(elevation) * std::sin(azimuth);
  const double col_phase = std::cos(elevation);
  CVector v(static_cast<Eigen::Index>(count));
  for (std::size_t x = 0; x < count; ++x) {
    const double phase = two_pi * spacing_ratio *
                         (static_cast<double>(x / side) * row_phase + static_cast<double>(x % side) * col_phase);
    v(static_cast<Eigen::Index>(x)) = std::polar(1.0, phase);
  }
  return v;
}

CMatrix LosComponents::stacked_user_ris() const {
  const std::size_t n_count = user_ris.rows();
  const std::size_t k_count = user_ris.cols();
  const Eigen::Index nr = n_count > 0 && k_count > 0 ? user_ris(0, 0).size() : 0;
  CMatrix out(static_cast<Eigen::Index>(n_count) * nr, static_cast<Eigen::Index>(k_count));
  for (std::size_t n = 0; n < n_count; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      out.block(static_cast<Eigen::Index>(n) * nr, static_cast<Eigen::Index>(k), nr, 1) = user_ris(n, k);
    }
  }
  return out;
}

CMatrix LosComponents::ris_ap_block(std::size_t m, std::size_t n) const {
  return ap_side(m, n) * ris_side(m, n).adjoint();
}

LosComponents los_components(const Topology& topo, const ChannelStats& stats) {
  topo.validate();
  stats.validate(topo);
  LosComponents los;
  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  los.user_ris = Grid<CVector>(n_count, k_count);
  los.ap_side = Grid<CVector>(m_count, n_count);
  los.ris_side = Grid<CVector>(m_count, n_count);
  for (std::size_t n = 0; n < n_count; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const Angles& a = stats.user_ris_arrival(n, k);
      los.user_ris(n, k) = array_response(topo.elements_per_ris, a.azimuth, a.elevation, stats.spacing_ratio);
    }
  }
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t n = 0; n < n_count; ++n) {
      const Angles& at_ap = stats.ap_arrival(m, n);
      const Angles& at_ris = stats.ris_ap_departure(m, n);
      los.ap_side(m, n) = array_response(topo.antennas_per_ap, at_ap.azimuth, at_ap.elevation, stats.spacing_ratio);
      los.ris_side(m, n) = array_response(topo.elements_per_ris, at_ris.azimuth, at_ris.elevation, stats.spacing_ratio);
    }
  }
  return los;
}

namespace {

struct RicianWeights {
  double los;
  double scatter;
};

RicianWeights rician_weights(double factor, bool pure_los) {
  if (pure_los) return {1.0, 0.0};
  return {std::sqrt(factor / (factor + 1.0)), std::sqrt(1.0 / (factor + 1.0))};
}

}  // namespace

ChannelSampler::ChannelSampler(const Topology& topo, const ChannelStats& stats)
    : m_count_(topo.num_aps()),
      n_count_(topo.num_ris()),
      k_count_(topo.num_users()),
      mb_(topo.antennas_per_ap),
      nr_(topo.elements_per_ris),
      los_(los_components(topo, stats)) {
  const auto mb = static_cast<Eigen::Index>(mb_);
  const auto nr = static_cast<Eigen::Index>(nr_);
  user_ris_mean_ = CMatrix::Zero(static_cast<Eigen::Index>(n_count_) * nr, static_cast<Eigen::Index>(k_count_));
  ris_ap_mean_ = CMatrix::Zero(static_cast<Eigen::Index>(m_count_) * mb, static_cast<Eigen::Index>(n_count_) * nr);
  user_ris_scatter_.resize(static_cast<Eigen::Index>(n_count_), static_cast<Eigen::Index>(k_count_));
  ris_ap_scatter_.resize(static_cast<Eigen::Index>(m_count_), static_cast<Eigen::Index>(n_count_));
  direct_scale_.resize(static_cast<Eigen::Index>(m_count_), static_cast<Eigen::Index>(k_count_));

  for (std::size_t n = 0; n < n_count_; ++n) {
    for (std::size_t k = 0; k < k_count_; ++k) {
      const double amp = std::sqrt(stats.user_ris_gain(n, k));
      const RicianWeights w = rician_weights(stats.user_ris_rician(n, k), stats.pure_los);
      user_ris_mean_.block(static_cast<Eigen::Index>(n) * nr, static_cast<Eigen::Index>(k), nr, 1) =
          (amp * w.los) * los_.user_ris(n, k);
      user_ris_scatter_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = amp * w.scatter;
    }
  }
  for (std::size_t m = 0; m < m_count_; ++m) {
    for (std::size_t n = 0; n < n_count_; ++n) {
      const double amp = std::sqrt(stats.ris_ap_gain(m, n));
      const RicianWeights w = rician_weights(stats.ris_ap_rician(m, n), stats.pure_los);
      ris_ap_mean_.block(static_cast<Eigen::Index>(m) * mb, static_cast<Eigen::Index>(n) * nr, mb, nr) =
          (amp * w.los) * los_.ris_ap_block(m, n);
      ris_ap_scatter_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = amp * w.scatter;
    }
    for (std::size_t k = 0; k < k_count_; ++k) {
      direct_scale_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = std::sqrt(stats.user_ap_gain(m, k));
    }
  }
}

ChannelRealization ChannelSampler::sample(Rng& rng) const {
  ChannelRealization out;
  sample_into(rng, out);
  return out;
}

void ChannelSampler::sample_into(Rng& rng, ChannelRealization& out) const {
  boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto gaussian = [&]() { return cdouble(normal(rng), normal(rng)); };
  const auto mb = static_cast<Eigen::Index>(mb_);
  const auto nr = static_cast<Eigen::Index>(nr_);

  out.direct.resize(static_cast<Eigen::Index>(m_count_) * mb, static_cast<Eigen::Index>(k_count_));
  for (Eigen::Index k = 0; k < out.direct.cols(); ++k) {
    for (Eigen::Index row = 0; row < out.direct.rows(); ++row) {
      out.direct(row, k) = direct_scale_(row / mb, k) * gaussian();
    }
  }

  out.user_ris = user_ris_mean_;
  for (Eigen::Index k = 0; k < out.user_ris.cols(); ++k) {
    for (Eigen::Index row = 0; row < out.user_ris.rows(); ++row) {
      const double s = user_ris_scatter_(row / nr, k);
      if (s != 0.0) out.user_ris(row, k) += s * gaussian();
    }
  }

  out.ris_ap = ris_ap_mean_;
  for (Eigen::Index col = 0; col < out.ris_ap.cols(); ++col) {
    for (Eigen::Index row = 0; row < out.ris_ap.rows(); ++row) {
      const double s = ris_ap_scatter_(row / mb, col / nr);
      if (s != 0.0) out.ris_ap(row, col) += s * gaussian();
    }
  }
}

ChannelRealization sample_realization(const Topology& topo, const ChannelStats& stats, Rng& rng) {
  return ChannelSampler(topo, stats).sample(rng);
}

CMatrix cascaded_channel(const CMatrix& ris_ap, const PhaseConfig& phases, const CMatrix& user_ris) {
  const auto len = static_cast<Eigen::Index>(phases.size());
  if (ris_ap.cols() != len || user_ris.rows() != len) {
    throw std::invalid_argument("cascaded channel dimensions do not match the phase configuration");
  }
  CMatrix scaled = user_ris;
  const auto angles = phases.angles();
  for (Eigen::Index i = 0; i < len; ++i) {
    scaled.row(i) *= std::polar(1.0, angles[static_cast<std::size_t>(i)]);
  }
  return ris_ap * scaled;
}

ChannelDims dims_of(const Topology& topo) noexcept {
  return {topo.num_aps(), topo.num_ris(), topo.num_users(), topo.antennas_per_ap, topo.elements_per_ris};
}

namespace {

constexpr std::uint32_t dump_magic = 0x31534952;  // "RIS1"

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>(bits[i]);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), bits.size());
  if (!in) throw std::runtime_error("truncated realization dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

void put_matrix(std::ostream& out, const CMatrix& mat) {
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      put_le(out, mat(r, c).real());
      put_le(out, mat(r, c).imag());
    }
  }
}

CMatrix get_matrix(std::istream& in, std::size_t rows, std::size_t cols) {
  CMatrix mat(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      mat(r, c) = {re, im};
    }
  }
  return mat;
}

std::uint16_t narrow_dim(std::size_t v) {
  if (v > 0xffff) throw std::invalid_argument("dimension too large for the dump header");
  return static_cast<std::uint16_t>(v);
}

}  // namespace

void write_realization(std::ostream& out, const ChannelDims& dims, const ChannelRealization& real) {
  const auto rows_ap = static_cast<Eigen::Index>(dims.num_aps * dims.antennas_per_ap);
  const auto rows_ris = static_cast<Eigen::Index>(dims.num_ris * dims.elements_per_ris);
  const auto users = static_cast<Eigen::Index>(dims.num_users);
  if (real.direct.rows() != rows_ap || real.direct.cols() != users || real.user_ris.rows() != rows_ris ||
      real.user_ris.cols() != users || real.ris_ap.rows() != rows_ap || real.ris_ap.cols() != rows_ris) {
    throw std::invalid_argument("realization does not match the given dimensions");
  }
  put_le(out, dump_magic);
  put_le(out, narrow_dim(dims.num_aps));
  put_le(out, narrow_dim(dims.num_ris));
  put_le(out, narrow_dim(dims.num_users));
  put_le(out, narrow_dim(dims.antennas_per_ap));
  put_le(out, narrow_dim(dims.elements_per_ris));
  put_le(out, std::uint16_t{0});
  put_matrix(out, real.direct);
  put_matrix(out, real.user_ris);
  put_matrix(out, real.ris_ap);
}

ChannelRealization read_realization(std::istream& in, ChannelDims* dims) {
  if (get_le<std::uint32_t>(in) != dump_magic) throw std::runtime_error("not a realization dump");
  ChannelDims d;
  d.num_aps = get_le<std::uint16_t>(in);
  d.num_ris = get_le<std::uint16_t>(in);
  d.num_users = get_le<std::uint16_t>(in);
  d.antennas_per_ap = get_le<std::uint16_t>(in);
  d.elements_per_ris = get_le<std::uint16_t>(in);
  get_le<std::uint16_t>(in);
  ChannelRealization real;
  real.direct = get_matrix(in, d.num_aps * d.antennas_per_ap, d.num_users);
  real.user_ris = get_matrix(in, d.num_ris * d.elements_per_ris, d.num_users);
  real.ris_ap = get_matrix(in, d.num_aps * d.antennas_per_ap, d.num_ris * d.elements_per_ris);
  if (dims) *dims = d;
  return real;
}

}  // namespace rislab
