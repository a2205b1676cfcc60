#include "rislab/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>

#include "rislab/parallel.hpp"
#include "rislab/rng.hpp"

namespace rislab {

namespace {

constexpr std::size_t block_size = 256;

CMatrix composite(const ChannelRealization& real, const PhaseConfig& phases) {
  return cascaded_channel(real.ris_ap, phases, real.user_ris) + real.direct;
}

double sinr_from_gram(const CMatrix& gram, const TransmitConfig& tx, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  const double norm2 = gram(kk, kk).real();
  double denom = tx.noise * norm2;
  for (Eigen::Index i = 0; i < gram.cols(); ++i) {
    if (i != kk) denom += tx.power[static_cast<std::size_t>(i)] * std::norm(gram(kk, i));
  }
  const double num = tx.power[k] * norm2 * norm2;
  if (num == 0.0) return 0.0;
  return num / denom;
}

void check_trials(std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
}

/// Runs trial_fn(trial, sums) per trial in fixed-size blocks and merges
/// block sums in a fixed pairwise order.
template <typename TrialFn>
std::vector<double> blocked_sums(std::size_t trials, std::size_t width, TrialFn&& trial_fn) {
  const std::size_t blocks = (trials + block_size - 1) / block_size;
  std::vector<double> partial(blocks * width, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    double* acc = partial.data() + b * width;
    const std::size_t end = std::min(trials, (b + 1) * block_size);
    for (std::size_t t = b * block_size; t < end; ++t) trial_fn(t, acc);
  });
  std::vector<double> total(width);
  std::vector<double> column(blocks);
  for (std::size_t w = 0; w < width; ++w) {
    for (std::size_t b = 0; b < blocks; ++b) column[b] = partial[b * width + w];
    total[w] = pairwise_sum(column.data(), blocks);
  }
  return total;
}

McRate finish_rate(const std::vector<double>& sums, std::size_t k_count, std::size_t trials) {
  McRate out;
  out.rate.resize(k_count);
  out.std_error.resize(k_count);
  const double n = static_cast<double>(trials);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double mean = sums[k] / n;
    out.rate[k] = mean;
    if (trials > 1) {
      const double var = std::max(0.0, (sums[k_count + k] - n * mean * mean) / (n - 1.0));
      out.std_error[k] = std::sqrt(var / n);
    } else {
      out.std_error[k] = 0.0;
    }
  }
  return out;
}

void accumulate_moments(const CMatrix& gram, std::size_t k_count, double* acc) {
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double e2 = gram(kk, kk).real();
    acc[k] += e2;
    acc[k_count + k] += e2 * e2;
    for (std::size_t i = k + 1; i < k_count; ++i) {
      acc[2 * k_count + k * k_count + i] += std::norm(gram(kk, static_cast<Eigen::Index>(i)));
    }
  }
}

McMoments finish_moments(const std::vector<double>& sums, std::size_t k_count, std::size_t trials) {
  McMoments out;
  out.trials = trials;
  const double n = static_cast<double>(trials);
  out.e_noise.resize(k_count);
  out.e_signal.resize(k_count);
  out.interference = Grid<double>(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    out.e_noise[k] = sums[k] / n;
    out.e_signal[k] = sums[k_count + k] / n;
    if (out.e_signal[k] < out.e_noise[k] * out.e_noise[k] * (1.0 - 1e-12)) {
      throw std::logic_error("sampled fourth moment below squared second moment");
    }
    for (std::size_t i = k + 1; i < k_count; ++i) {
      const double v = sums[2 * k_count + k * k_count + i] / n;
      out.interference(k, i) = v;
      out.interference(i, k) = v;
    }
  }
  return out;
}

McRate run_rate(const Topology& topo, const ChannelStats& stats, const PhaseConfig* fixed,
                const TransmitConfig& tx, std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  const std::size_t k_count = topo.num_users();
  tx.validate(k_count);
  const ChannelSampler sampler(topo, stats);
  const auto sums = blocked_sums(trials, 2 * k_count, [&](std::size_t t, double* acc) {
    Rng rng = make_stream(seed, "mc", t);
    const ChannelRealization real = sampler.sample(rng);
    CMatrix v;
    if (fixed) {
      v = composite(real, *fixed);
    } else {
      Rng prng = make_stream(seed, "phases", t);
      v = composite(real, random_phases(topo.num_ris(), topo.elements_per_ris, prng));
    }
    const CMatrix gram = v.adjoint() * v;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double r = std::log2(1.0 + sinr_from_gram(gram, tx, k));
      acc[k] += r;
      acc[k_count + k] += r * r;
    }
  });
  return finish_rate(sums, k_count, trials);
}

}  // namespace

double McRate::sum_rate() const {
  double s = 0.0;
  for (const double r : rate) s += r;
  return s;
}

double sinr_instant(const ChannelRealization& real, const PhaseConfig& phases, const TransmitConfig& tx,
                    std::size_t k) {
  const CMatrix v = composite(real, phases);
  if (k >= static_cast<std::size_t>(v.cols())) throw std::out_of_range("user index out of range");
  if (tx.power.size() != static_cast<std::size_t>(v.cols())) {
    throw std::invalid_argument("one transmit power per user is required");
  }
  const CMatrix gram = v.adjoint() * v;
  return sinr_from_gram(gram, tx, k);
}

McRate mc_rate(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
               const TransmitConfig& tx, std::size_t trials, std::uint64_t seed) {
  return run_rate(topo, stats, &phases, tx, trials, seed);
}

McRate mc_rate_random_phases(const Topology& topo, const ChannelStats& stats, const TransmitConfig& tx,
                             std::size_t trials, std::uint64_t seed) {
  return run_rate(topo, stats, nullptr, tx, trials, seed);
}

McMoments mc_moments(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                     std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  const std::size_t k_count = topo.num_users();
  const ChannelSampler sampler(topo, stats);
  const std::size_t pairs = k_count * k_count;
  const auto sums = blocked_sums(trials, 2 * k_count + pairs, [&](std::size_t t, double* acc) {
    Rng rng = make_stream(seed, "mc", t);
    const ChannelRealization real = sampler.sample(rng);
    const CMatrix v = composite(real, phases);
    const CMatrix gram = v.adjoint() * v;
    accumulate_moments(gram, k_count, acc);
  });
  return finish_moments(sums, k_count, trials);
}

McSurvey mc_survey(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                   std::span<const TransmitConfig> txs, std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  const std::size_t k_count = topo.num_users();
  for (const TransmitConfig& tx : txs) tx.validate(k_count);
  const ChannelSampler sampler(topo, stats);
  const std::size_t rate_base = 2 * k_count + k_count * k_count;
  const std::size_t width = rate_base + 2 * k_count * txs.size();
  const auto sums = blocked_sums(trials, width, [&](std::size_t t, double* acc) {
    Rng rng = make_stream(seed, "mc", t);
    const ChannelRealization real = sampler.sample(rng);
    const CMatrix v = composite(real, phases);
    const CMatrix gram = v.adjoint() * v;
    accumulate_moments(gram, k_count, acc);
    for (std::size_t j = 0; j < txs.size(); ++j) {
      double* racc = acc + rate_base + 2 * k_count * j;
      for (std::size_t k = 0; k < k_count; ++k) {
        const double r = std::log2(1.0 + sinr_from_gram(gram, txs[j], k));
        racc[k] += r;
        racc[k_count + k] += r * r;
      }
    }
  });
  McSurvey out;
  out.moments = finish_moments(sums, k_count, trials);
  for (std::size_t j = 0; j < txs.size(); ++j) {
    const auto first = sums.begin() + static_cast<std::ptrdiff_t>(rate_base + 2 * k_count * j);
    out.rates.push_back(finish_rate(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(2 * k_count)),
                                    k_count, trials));
  }
  return out;
}

Moments to_moments(const McMoments& mc) { return {mc.e_noise, mc.e_signal, mc.interference}; }

std::vector<double> rate_mc_moments(const Topology& topo, const ChannelStats& stats, const PhaseConfig& phases,
                                    const TransmitConfig& tx, std::size_t trials, std::uint64_t seed) {
  return assemble_rates(to_moments(mc_moments(topo, stats, phases, trials, seed)), tx).rate;
}

}  // namespace rislab
