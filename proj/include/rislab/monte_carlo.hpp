#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rislab/channel.hpp"
#include "rislab/closed_form.hpp"
#include "rislab/grid.hpp"
#include "rislab/phase.hpp"
#include "rislab/topology.hpp"

namespace rislab {

inline constexpr std::size_t default_trials = 100000;

/// Instantaneous MRC SINR of user k for one realization.
double sinr_instant(const ChannelRealization& real, const PhaseConfig& phases, const TransmitConfig& tx,
                    std::size_t k);

struct McRate {
  std::vector<double> rate;
  std::vector<double> std_error;

  [[nodiscard]] double sum_rate() const;
};

/// Sample moments of the composite channels v_k = g_k + d_k.
struct McMoments {
  std::vector<double> e_noise;   // E ||v_k||^2
  std::vector<double> e_signal;  // E ||v_k||^4
  Grid<double> interference;     // E |v_k^H v_i|^2
  std::size_t trials = 0;
};

/// Ergodic rate averaged over trials realizations with fixed phases.
McRate mc_rate(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
               const TransmitConfig& tx, std::size_t trials, std::uint64_t seed);

/// Same, with phases redrawn uniformly at every trial.
McRate mc_rate_random_phases(const Topology& topo, const ChannelStats& stats, const TransmitConfig& tx,
                             std::size_t trials, std::uint64_t seed);

McMoments mc_moments(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                     std::size_t trials, std::uint64_t seed);

/// Plugs sampled moments into the moment-ratio rate form.
std::vector<double> rate_mc_moments(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                                    const TransmitConfig& tx, std::size_t trials, std::uint64_t seed);

struct McSurvey {
  McMoments moments;
  std::vector<McRate> rates;  // one per transmit configuration
};

/// Moments and rates for several transmit configurations from one pass
/// over the same realizations as mc_moments and mc_rate.
McSurvey mc_survey(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                   std::span<const TransmitConfig> txs, std::size_t trials, std::uint64_t seed);

Moments to_moments(const McMoments& mc);

}  // namespace rislab
