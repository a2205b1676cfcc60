#include "rislab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rislab/parallel.hpp"
#include "rislab/units.hpp"

namespace rislab {

void GAConfig::validate() const {
  if (population != elites + crossover + mutation) {
    throw std::invalid_argument("population must equal elites + crossover + mutation");
  }
  if (elites < 1) throw std::invalid_argument("at least one elite is required");
  if (crossover < 1) throw std::invalid_argument("at least one crossover offspring is required");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw std::invalid_argument("mutation probability must lie in [0, 1]");
  }
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
  if (stall_generations < 1) throw std::invalid_argument("stall_generations must be at least 1");
  if (phase_bits > 16) throw std::invalid_argument("phase_bits must be at most 16");
}

std::vector<double> rank_scale(std::span<const double> fitness, std::size_t crossover_count) {
  const std::size_t s = fitness.size();
  if (s == 0) throw std::invalid_argument("rank_scale needs at least one individual");
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
  std::vector<double> weight(s);
  double total = 0.0;
  for (std::size_t pos = 0; pos < s; ++pos) {
    weight[order[pos]] = 1.0 / std::sqrt(static_cast<double>(pos + 1));
    total += weight[order[pos]];
  }
  const double scale = 2.0 * static_cast<double>(crossover_count) / total;
  for (double& w : weight) w *= scale;
  return weight;
}

std::vector<std::size_t> sus_select(std::span<const double> scaled, std::size_t count, Rng& rng) {
  if (scaled.empty()) throw std::invalid_argument("selection pool is empty");
  double total = 0.0;
  for (const double f : scaled) {
    if (!(f >= 0.0)) throw std::invalid_argument("scaled fitness must be non-negative");
    total += f;
  }
  std::vector<double> slot(scaled.size());
  for (std::size_t i = 0; i < slot.size(); ++i) {
    slot[i] = total > 0.0 ? scaled[i] / total : 1.0 / static_cast<double>(slot.size());
  }
  std::vector<std::size_t> picked;
  picked.reserve(count);
  if (count == 0) return picked;
  const double step = 1.0 / static_cast<double>(count);
  const double start = uniform_unit(rng) * step;
  std::size_t i = 0;
  double edge = slot[0];
  for (std::size_t j = 0; j < count; ++j) {
    const double pointer = start + static_cast<double>(j) * step;
    while (pointer >= edge && i + 1 < slot.size()) edge += slot[++i];
    picked.push_back(i);
  }
  return picked;
}

std::vector<double> crossover_at(std::span<const double> a1, std::span<const double> a2, std::size_t i1,
                                 std::size_t i2) {
  if (a1.size() != a2.size()) throw std::invalid_argument("parents differ in length");
  if (i1 > i2 || i2 > a1.size()) throw std::invalid_argument("crossover points out of order or range");
  std::vector<double> child(a1.begin(), a1.end());
  std::copy(a2.begin() + static_cast<std::ptrdiff_t>(i1), a2.begin() + static_cast<std::ptrdiff_t>(i2),
            child.begin() + static_cast<std::ptrdiff_t>(i1));
  return child;
}

std::vector<std::vector<double>> two_point_crossover(const std::vector<std::vector<double>>& parents, Rng& rng) {
  if (parents.size() % 2 != 0) throw std::invalid_argument("parents must come in pairs");
  std::vector<std::vector<double>> offspring;
  offspring.reserve(parents.size() / 2);
  for (std::size_t p = 0; p + 1 < parents.size(); p += 2) {
    const std::size_t len = parents[p].size();
    if (len < 2) throw std::invalid_argument("chromosome length must be at least 2");
    std::uniform_int_distribution<std::size_t> cut(1, len - 1);
    std::size_t i1 = cut(rng);
    std::size_t i2 = i1;
    if (len > 2) {
      while (i2 == i1) i2 = cut(rng);
    }
    const std::vector<double>* a1 = &parents[p];
    const std::vector<double>* a2 = &parents[p + 1];
    if (i1 > i2) {
      std::swap(i1, i2);
      std::swap(a1, a2);
    }
    offspring.push_back(crossover_at(*a1, *a2, i1, i2));
  }
  return offspring;
}

std::size_t uniform_mutation(std::vector<double>& chromosome, double p, Rng& rng, unsigned phase_bits) {
  std::size_t redrawn = 0;
  for (double& gene : chromosome) {
    if (uniform_unit(rng) < p) {
      gene = random_phase(rng, phase_bits);
      ++redrawn;
    }
  }
  return redrawn;
}

namespace {

void evaluate(const Objective& objective, std::vector<Individual>& pop, std::size_t from, std::size_t num_ris,
              std::size_t elements) {
  parallel_for(pop.size() - from, [&](std::size_t j) {
    Individual& ind = pop[from + j];
    ind.fitness = objective(PhaseConfig(num_ris, elements, ind.chromosome));
  });
}

double mean_fitness(const std::vector<Individual>& pop) {
  std::vector<double> f(pop.size());
  std::transform(pop.begin(), pop.end(), f.begin(), [](const Individual& i) { return i.fitness; });
  return pairwise_sum(f.data(), f.size()) / static_cast<double>(f.size());
}

}  // namespace

GAResult ga_optimize(const Objective& objective, std::size_t num_ris, std::size_t elements_per_ris,
                     const GAConfig& cfg) {
  cfg.validate();
  const std::size_t len = num_ris * elements_per_ris;
  if (len < 2) throw std::invalid_argument("chromosome length must be at least 2");
  const std::size_t cap = std::min(cfg.max_iters, len * 100);
  Rng rng = make_stream(cfg.seed, "ga");

  std::vector<Individual> pop(cfg.population);
  for (Individual& ind : pop) {
    ind.chromosome.resize(len);
    for (double& g : ind.chromosome) g = random_phase(rng, cfg.phase_bits);
  }
  evaluate(objective, pop, 0, num_ris, elements_per_ris);

  GAResult result;
  auto by_fitness = [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; };
  std::vector<double> fitness(cfg.population);
  for (std::size_t iter = 0;; ++iter) {
    std::stable_sort(pop.begin(), pop.end(), by_fitness);
    result.trace.push_back({iter, pop.front().fitness, mean_fitness(pop)});
    if (iter >= cfg.stall_generations &&
        result.trace[iter].best_fitness - result.trace[iter - cfg.stall_generations].best_fitness < cfg.tol) {
      result.converged = true;
      break;
    }
    if (iter >= cap) break;

    for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = pop[i].fitness;
    const std::vector<double> scaled = rank_scale(fitness, cfg.crossover);

    std::vector<Individual> next;
    next.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.elites; ++i) next.push_back(pop[i]);

    std::vector<std::vector<double>> mutants;
    mutants.reserve(cfg.mutation);
    for (std::size_t i = cfg.population - cfg.mutation; i < cfg.population; ++i) {
      mutants.push_back(pop[i].chromosome);
      uniform_mutation(mutants.back(), cfg.mutation_prob, rng, cfg.phase_bits);
    }

    const std::span<const double> pool(scaled.data() + cfg.elites, cfg.crossover);
    const std::vector<std::size_t> picks = sus_select(pool, 2 * cfg.crossover, rng);
    std::vector<std::vector<double>> parents;
    parents.reserve(picks.size());
    for (const std::size_t p : picks) parents.push_back(pop[cfg.elites + p].chromosome);
    std::vector<std::vector<double>> children = two_point_crossover(parents, rng);

    for (auto& c : children) next.push_back({std::move(c), 0.0});
    for (auto& c : mutants) next.push_back({std::move(c), 0.0});
    pop = std::move(next);
    evaluate(objective, pop, cfg.elites, num_ris, elements_per_ris);
  }
  result.iterations = result.trace.back().iteration;
  result.best_fitness = pop.front().fitness;
  result.best = PhaseConfig(num_ris, elements_per_ris, pop.front().chromosome);
  return result;
}

SearchResult exhaustive_search(const Objective& objective, std::size_t num_ris, std::size_t elements_per_ris,
                               unsigned bits, std::size_t cap) {
  const std::size_t len = num_ris * elements_per_ris;
  if (bits == 0) throw std::invalid_argument("exhaustive search needs at least one bit");
  const double total_bits = static_cast<double>(bits) * static_cast<double>(len);
  if (total_bits >= 63.0 || (std::size_t{1} << static_cast<unsigned>(total_bits)) > cap) {
    throw std::invalid_argument("search space of 2^" + std::to_string(static_cast<unsigned>(total_bits)) +
                                " exceeds the cap of " + std::to_string(cap));
  }
  const std::size_t count = std::size_t{1} << static_cast<unsigned>(total_bits);
  const std::size_t levels = std::size_t{1} << bits;
  const double step = two_pi / static_cast<double>(levels);
  auto decode = [&](std::size_t code) {
    std::vector<double> angles(len);
    for (std::size_t g = 0; g < len; ++g) {
      angles[g] = step * static_cast<double>(code % levels);
      code /= levels;
    }
    return PhaseConfig(num_ris, elements_per_ris, angles);
  };
  std::vector<double> values(count);
  parallel_for(count, [&](std::size_t code) { values[code] = objective(decode(code)); });
  const auto best = std::max_element(values.begin(), values.end());
  const auto code = static_cast<std::size_t>(best - values.begin());
  return {decode(code), *best, count};
}

Objective sum_rate_objective(const RateModel& model, const TransmitConfig& tx) {
  return [&model, tx](const PhaseConfig& phases) { return model.evaluate(phases, tx).sum_rate(); };
}

Objective min_rate_objective(const RateModel& model, const TransmitConfig& tx) {
  return [&model, tx](const PhaseConfig& phases) { return model.evaluate(phases, tx).min_rate(); };
}

Objective ee_objective(const RateModel& model, const TransmitConfig& tx, const EnergyModel& energy,
                       const Topology& topo) {
  energy.validate(topo);
  return [&model, &topo, tx, energy](const PhaseConfig& phases) {
    const RateBreakdown r = model.evaluate(phases, tx);
    return energy_efficiency(energy, tx, r.rate, topo, true);
  };
}

}  // namespace rislab
