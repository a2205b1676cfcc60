#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rislab/grid.hpp"
#include "rislab/phase.hpp"
#include "rislab/topology.hpp"

namespace rislab {

/// Per-user moment terms and the resulting SINR and rate.
struct RateBreakdown {
  std::vector<double> e_noise;
  std::vector<double> e_signal;
  Grid<double> interference;  // K x K, diagonal unused
  std::vector<double> sinr;
  std::vector<double> rate;  // bit/s/Hz

  [[nodiscard]] double sum_rate() const;
  [[nodiscard]] double min_rate() const;
};

struct Moments {
  std::vector<double> e_noise;
  std::vector<double> e_signal;
  Grid<double> interference;
};

/// SINR = p_k E_signal / (sum_{i != k} p_i I_ki + noise E_noise).
RateBreakdown assemble_rates(const Moments& moments, const TransmitConfig& tx);

/// Closed-form rate evaluator. Everything that does not depend on the
/// phase configuration is cached at construction.
class RateModel {
 public:
  RateModel(const Topology& topo, const ChannelStats& stats);

  [[nodiscard]] std::size_t num_aps() const noexcept { return m_; }
  [[nodiscard]] std::size_t num_ris() const noexcept { return n_; }
  [[nodiscard]] std::size_t num_users() const noexcept { return k_; }
  [[nodiscard]] std::size_t elements_per_ris() const noexcept { return nr_; }
  [[nodiscard]] std::size_t antennas_per_ap() const noexcept { return mb_; }

  [[nodiscard]] double c_factor(std::size_t m, std::size_t n, std::size_t k) const;
  /// c * delta * eps; equals alpha * beta for pure-LoS cascades.
  [[nodiscard]] double los_gain(std::size_t m, std::size_t n, std::size_t k) const;
  [[nodiscard]] std::complex<double> f_value(std::size_t m, std::size_t n, std::size_t k,
                                             const PhaseConfig& phases) const;

  [[nodiscard]] double e_noise(std::size_t k, const PhaseConfig& phases) const;
  [[nodiscard]] double e_signal(std::size_t k, const PhaseConfig& phases) const;
  [[nodiscard]] double interference(std::size_t k, std::size_t i, const PhaseConfig& phases) const;

  [[nodiscard]] Moments moments(const PhaseConfig& phases) const;
  [[nodiscard]] RateBreakdown evaluate(const PhaseConfig& phases, const TransmitConfig& tx) const;

 private:
  struct Amplitudes {
    double c;     // c
    double sc;    // sqrt(c)
    double los;   // sqrt(c delta eps)
    double zlos;  // sqrt(c delta)
    double hlos;  // sqrt(c eps)
  };

  /// Phase-dependent parts of one user's moments are quadratic forms in
  /// the vector f_k = (f_{m,n,k}) indexed by m * N + n.
  struct UserForms {
    std::vector<std::complex<double>> los;     // sum of LoS products = f^H los f
    std::vector<std::complex<double>> signal;  // Hermitian
    double noise_const = 0.0;
    double signal_const = 0.0;
  };

  struct PairForms {
    std::vector<std::complex<double>> cross;   // f_k^H cross f_i
    std::vector<std::complex<double>> own_k;   // Hermitian
    std::vector<std::complex<double>> own_i;   // Hermitian
    std::complex<double> scatter{};            // multiplies the cross form
    double constant = 0.0;
  };

  [[nodiscard]] std::size_t idx(std::size_t m, std::size_t n, std::size_t k) const noexcept {
    return (m * n_ + n) * k_ + k;
  }
  [[nodiscard]] std::size_t pair_index(std::size_t k, std::size_t i) const noexcept;

  void check_phases(const PhaseConfig& phases) const;
  [[nodiscard]] std::vector<std::complex<double>> f_table(const PhaseConfig& phases) const;
  void build_user(std::size_t k);
  void build_pair(std::size_t k, std::size_t i);
  [[nodiscard]] double noise_term(std::size_t k, const std::vector<std::complex<double>>& f) const;
  [[nodiscard]] double signal_term(std::size_t k, const std::vector<std::complex<double>>& f) const;
  [[nodiscard]] double interference_term(std::size_t k, std::size_t i,
                                         const std::vector<std::complex<double>>& f) const;

  std::size_t m_, n_, k_, mb_, nr_;
  std::vector<Amplitudes> amp_;                  // (m, n, k)
  std::vector<double> direct_;                   // gamma, (m, k)
  std::vector<std::complex<double>> steer_;      // e^{j zeta}, (k, m, n, r)
  std::vector<std::complex<double>> ap_inner_;   // a_Mb(m,n1)^H a_Mb(m,n2)
  std::vector<std::complex<double>> ris_inner_;  // a_Nr(m1,n1)^H a_Nr(m2,n2)
  std::vector<std::complex<double>> user_inner_; // hbar(n,a)^H hbar(n,b)
  std::vector<UserForms> users_;
  std::vector<PairForms> pairs_;                 // k < i
};

double c_factor(std::size_t m, std::size_t n, std::size_t k, const ChannelStats& stats);
std::complex<double> f_value(std::size_t m, std::size_t n, std::size_t k, const PhaseConfig& phases,
                             const ChannelStats& stats);
double e_noise(std::size_t k, const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo);
double e_signal(std::size_t k, const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo);
double interference(std::size_t k, std::size_t i, const PhaseConfig& phases, const ChannelStats& stats,
                    const Topology& topo);
RateBreakdown rate_theorem1(const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo,
                            const TransmitConfig& tx);

/// Rate without any RIS (direct links only).
std::vector<double> rate_ris_free(const ChannelStats& stats, const Topology& topo, const TransmitConfig& tx);
/// Rate when both cascaded hops are Rayleigh; independent of the phases.
std::vector<double> rate_nlos(const ChannelStats& stats, const Topology& topo, const TransmitConfig& tx);
/// Large-array limit of rate_nlos for a given number of RIS elements.
std::vector<double> rate_nlos_asymptotic(const ChannelStats& stats, const Topology& topo,
                                         const TransmitConfig& tx, std::size_t elements_per_ris);
/// Large-array limit when the cascaded hops are LoS only.
std::vector<double> rate_los_asymptotic(const PhaseConfig& phases, const ChannelStats& stats,
                                        const Topology& topo, const TransmitConfig& tx);
/// Large-array limit when phases are redrawn at random every coherence interval.
std::vector<double> rate_random_phase_asymptotic(const ChannelStats& stats, const Topology& topo,
                                                 const TransmitConfig& tx);

/// log2(1 + sinr); +inf for an infinite SINR.
double rate_from_sinr(double sinr);

}  // namespace rislab
