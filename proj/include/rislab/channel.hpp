#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>

#include <Eigen/Dense>

#include "rislab/grid.hpp"
#include "rislab/phase.hpp"
#include "rislab/rng.hpp"
#include "rislab/topology.hpp"

namespace rislab {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Steering vector of a square planar array with count elements.
CVector array_response(std::size_t count, double azimuth, double elevation, double spacing_ratio);

/// Deterministic LoS parts. The RIS-AP LoS matrix is kept as its two
/// rank-one factors, ap_side(m, n) * ris_side(m, n)^H.
struct LosComponents {
  Grid<CVector> user_ris;  // N x K, length elements_per_ris
  Grid<CVector> ap_side;   // M x N, length antennas_per_ap
  Grid<CVector> ris_side;  // M x N, length elements_per_ris

  /// User-RIS LoS stacked over surfaces: (N * N_r) x K.
  [[nodiscard]] CMatrix stacked_user_ris() const;
  /// Materializes one RIS-AP LoS block (for inspection only).
  [[nodiscard]] CMatrix ris_ap_block(std::size_t m, std::size_t n) const;
};

LosComponents los_components(const Topology& topo, const ChannelStats& stats);

/// One draw of all small-scale channels.
struct ChannelRealization {
  CMatrix direct;    // (M * M_b) x K
  CMatrix user_ris;  // (N * N_r) x K
  CMatrix ris_ap;    // (M * M_b) x (N * N_r)
};

/// Draws realizations for a fixed scenario; LoS parts and weights are
/// computed once at construction.
class ChannelSampler {
 public:
  ChannelSampler(const Topology& topo, const ChannelStats& stats);

  [[nodiscard]] ChannelRealization sample(Rng& rng) const;
  void sample_into(Rng& rng, ChannelRealization& out) const;

  [[nodiscard]] const LosComponents& los() const noexcept { return los_; }

 private:
  std::size_t m_count_, n_count_, k_count_, mb_, nr_;
  LosComponents los_;
  CMatrix user_ris_mean_;
  CMatrix ris_ap_mean_;
  Eigen::MatrixXd user_ris_scatter_;  // per (n, k) NLoS amplitude
  Eigen::MatrixXd ris_ap_scatter_;    // per (m, n) NLoS amplitude
  Eigen::MatrixXd direct_scale_;      // per (m, k)
};

ChannelRealization sample_realization(const Topology& topo, const ChannelStats& stats, Rng& rng);

/// Z * Phi * H without forming the block-diagonal phase matrix.
CMatrix cascaded_channel(const CMatrix& ris_ap, const PhaseConfig& phases, const CMatrix& user_ris);

struct ChannelDims {
  std::size_t num_aps = 0;
  std::size_t num_ris = 0;
  std::size_t num_users = 0;
  std::size_t antennas_per_ap = 0;
  std::size_t elements_per_ris = 0;
  bool operator==(const ChannelDims&) const = default;
};

/// Little-endian binary dump: 16-byte header then D, H, Z row-major.
void write_realization(std::ostream& out, const ChannelDims& dims, const ChannelRealization& real);
ChannelRealization read_realization(std::istream& in, ChannelDims* dims = nullptr);

ChannelDims dims_of(const Topology& topo) noexcept;

}  // namespace rislab
