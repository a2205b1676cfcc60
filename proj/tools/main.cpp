#include <exception>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "experiments.hpp"

int main(int argc, char** argv) {
  using namespace rislab;
  CLI::App app{"RIS-aided cell-free massive MIMO uplink laboratory"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run one experiment mode");

  cli::RunOptions opts;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> bits;
  cli::Overrides over;

  run->add_option("experiment", opts.mode, "Experiment mode")->required()->check(CLI::IsMember(cli::run_modes()));
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
  run->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Master seed (default: the scenario seed)");
  run->add_option("--trials", opts.trials, "Monte-Carlo trials")->capture_default_str();
  run->add_option("--mode", opts.inner_mode, "Per-point mode for sweeps")
      ->check(CLI::IsMember(cli::sweep_modes()))
      ->capture_default_str();
  run->add_option("--var", opts.sweep_var, "Sweep variable")->check(CLI::IsMember(cli::sweep_vars()));
  run->add_option("--from", opts.from, "Sweep start");
  run->add_option("--to", opts.to, "Sweep end (inclusive)");
  run->add_option("--step", opts.step, "Sweep step")->capture_default_str();
  run->add_option("--bits", bits, "Phase resolution in bits (exhaustive search, GA)");
  run->add_option("--ga-S", opts.ga.population, "GA population size")->capture_default_str();
  run->add_option("--ga-Se", opts.ga.elites, "GA elite count")->capture_default_str();
  run->add_option("--ga-Sc", opts.ga.crossover, "GA crossover offspring")->capture_default_str();
  run->add_option("--ga-Sm", opts.ga.mutation, "GA mutation offspring")->capture_default_str();
  run->add_option("--ga-pm", opts.ga.mutation_prob, "GA per-gene mutation probability")->capture_default_str();
  run->add_option("--ga-tol", opts.ga.tol, "GA stopping threshold")->capture_default_str();
  run->add_option("--ga-iters", opts.ga.max_iters, "GA iteration cap")->capture_default_str();
  run->add_option("--ga-stall", opts.ga.stall_generations, "Generations over which the best fitness must gain tol")->capture_default_str();
  run->add_option("--M", over.aps, "Number of APs");
  run->add_option("--N", over.ris, "Number of RISs");
  run->add_option("--K", over.users, "Number of users");
  run->add_option("--Mb", over.antennas, "Antennas per AP");
  run->add_option("--Nr", over.elements, "Elements per RIS");
  run->add_option("--P", over.power_dbm, "Transmit power (dBm)");

  CLI11_PARSE(app, argc, argv);

  try {
    opts.file = scenario_path.empty() ? ScenarioFile{default_paper_scenario(), {}} : load_scenario(scenario_path);
    cli::apply_overrides(opts.file.scenario, over);
    opts.seed = seed.value_or(opts.file.scenario.seed);
    opts.file.scenario.seed = opts.seed;
    if (bits) {
      opts.bits = *bits;
      opts.ga.phase_bits = *bits;
    }
    if (opts.mode == "sweep" && opts.sweep_var.empty()) throw std::invalid_argument("sweep needs --var");
    cli::run(opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
