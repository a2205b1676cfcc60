#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rislab/closed_form.hpp"
#include "rislab/energy.hpp"
#include "rislab/phase.hpp"
#include "rislab/rng.hpp"
#include "rislab/topology.hpp"

namespace rislab {

/// Maps a phase configuration to a fitness value. Must be safe to call
/// concurrently.
using Objective = std::function<double(const PhaseConfig&)>;

struct GAConfig {
  std::size_t population = 200;
  std::size_t elites = 10;
  std::size_t crossover = 160;
  std::size_t mutation = 30;
  double mutation_prob = 0.2;  // per gene
  std::size_t max_iters = 10000;
  double tol = 1e-5;
  /// Convergence is declared once the best fitness has gained less than
  /// tol over this many generations.
  std::size_t stall_generations = 50;
  /// 0 for continuous phases, otherwise phases are restricted to 2^bits levels.
  unsigned phase_bits = 0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Individual {
  std::vector<double> chromosome;
  double fitness = 0.0;
};

struct TracePoint {
  std::size_t iteration = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

struct GAResult {
  PhaseConfig best;
  double best_fitness = 0.0;
  std::vector<TracePoint> trace;
  bool converged = false;
  std::size_t iterations = 0;
};

struct SearchResult {
  PhaseConfig best;
  double best_fitness = 0.0;
  std::size_t evaluated = 0;
};

inline constexpr std::size_t default_search_cap = std::size_t{1} << 20;

/// f_i = 2 S_c rank_i^{-1/2} / sum_j rank_j^{-1/2}, rank 1 = fittest.
/// Ties keep their input order.
std::vector<double> rank_scale(std::span<const double> fitness, std::size_t crossover_count);

/// Stochastic universal sampling. Returns count indices into the pool.
std::vector<std::size_t> sus_select(std::span<const double> scaled, std::size_t count, Rng& rng);

/// [a1(1:i1), a2(i1+1:i2), a1(i2+1:L)] with 1-based cut points i1 <= i2.
std::vector<double> crossover_at(std::span<const double> a1, std::span<const double> a2, std::size_t i1,
                                 std::size_t i2);

/// One offspring per consecutive parent pair.
std::vector<std::vector<double>> two_point_crossover(const std::vector<std::vector<double>>& parents, Rng& rng);

/// Redraws each gene with probability p. Returns the number of redrawn genes.
std::size_t uniform_mutation(std::vector<double>& chromosome, double p, Rng& rng, unsigned phase_bits = 0);

GAResult ga_optimize(const Objective& objective, std::size_t num_ris, std::size_t elements_per_ris,
                     const GAConfig& cfg);

/// Enumerates every configuration on the 2^bits grid.
SearchResult exhaustive_search(const Objective& objective, std::size_t num_ris, std::size_t elements_per_ris,
                               unsigned bits, std::size_t cap = default_search_cap);

Objective sum_rate_objective(const RateModel& model, const TransmitConfig& tx);
Objective min_rate_objective(const RateModel& model, const TransmitConfig& tx);
/// Energy efficiency with the RIS power included. model and topo must outlive the objective.
Objective ee_objective(const RateModel& model, const TransmitConfig& tx, const EnergyModel& energy,
                       const Topology& topo);

}  // namespace rislab
