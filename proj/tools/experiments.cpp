#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rislab/closed_form.hpp"
#include "rislab/energy.hpp"
#include "rislab/monte_carlo.hpp"
#include "rislab/parallel.hpp"
#include "rislab/units.hpp"

namespace rislab::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::size_t as_square(double v, const char* what) {
  const std::size_t n = as_count(v, what);
  if (!is_perfect_square(n)) throw std::invalid_argument(std::string(what) + " must be a perfect square");
  return n;
}

struct Point {
  std::string var;
  std::optional<double> value;
};

struct Context {
  const RunOptions& opts;
  ResultTable& table;
  std::ostream& log;
};

void add_rates(Context& ctx, const Point& pt, const std::string& metric, const std::vector<double>& rate,
               const std::vector<double>* err = nullptr) {
  double sum = 0.0;
  double worst = rate.empty() ? 0.0 : rate.front();
  for (std::size_t k = 0; k < rate.size(); ++k) {
    std::optional<double> se;
    if (err) se = (*err)[k];
    ctx.table.add({pt.var, pt.value, metric, std::to_string(k), rate[k], se});
    sum += rate[k];
    worst = std::min(worst, rate[k]);
  }
  ctx.table.add({pt.var, pt.value, metric + "_sum", "", sum, std::nullopt});
  ctx.table.add({pt.var, pt.value, metric + "_min", "", worst, std::nullopt});
}

void write_trace(const std::filesystem::path& path, const GAResult& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,best_fitness,mean_fitness\n";
  for (const TracePoint& t : r.trace) out << t.iteration << ',' << num(t.best_fitness) << ',' << num(t.mean_fitness) << '\n';
}

PhaseConfig fixed_phases(const Scenario& sc, std::uint64_t seed) {
  Rng rng = make_stream(seed, "phases");
  return random_phases(sc.topology.num_ris(), sc.topology.elements_per_ris, rng);
}

void run_ga(Context& ctx, const ScenarioConfig& cfg, const EnergySettings& energy, const std::string& mode,
            const Point& pt, const std::string& trace_name) {
  const Scenario sc = build_scenario(cfg, ctx.opts.seed);
  const TransmitConfig tx = cfg.transmit();
  const RateModel model(sc.topology, sc.stats);
  const EnergyModel em = energy.model(sc.topology);
  Objective objective;
  if (mode == "ga-sum") {
    objective = sum_rate_objective(model, tx);
  } else if (mode == "ga-min") {
    objective = min_rate_objective(model, tx);
  } else {
    objective = ee_objective(model, tx, em, sc.topology);
  }
  GAConfig ga = ctx.opts.ga;
  ga.seed = ctx.opts.seed;
  const auto t0 = Clock::now();
  const GAResult r = ga_optimize(objective, sc.topology.num_ris(), sc.topology.elements_per_ris, ga);
  const double elapsed = seconds_since(t0);
  write_trace(ctx.opts.out_dir / trace_name, r);
  ctx.log << mode << (pt.value ? " at " + pt.var + "=" + num(*pt.value) : std::string()) << ": best "
          << num(r.best_fitness) << " after " << r.iterations << " iterations"
          << (r.converged ? "" : " (iteration cap)") << ", " << num(elapsed) << " s\n";

  const RateBreakdown rates = model.evaluate(r.best, tx);
  ctx.table.add({pt.var, pt.value, "best_fitness", "", r.best_fitness, std::nullopt});
  ctx.table.add({pt.var, pt.value, "iterations", "", static_cast<double>(r.iterations), std::nullopt});
  add_rates(ctx, pt, "rate_closed", rates.rate);
  ctx.table.add({pt.var, pt.value, "ee", "", energy_efficiency(em, tx, rates.rate, sc.topology, true), std::nullopt});
  const std::vector<double> free = rate_ris_free(sc.stats, sc.topology, tx);
  add_rates(ctx, pt, "rate_ris_free", free);
  ctx.table.add({pt.var, pt.value, "ee_ris_free", "", energy_efficiency(em, tx, free, sc.topology, false),
                 std::nullopt});
}

void run_point(Context& ctx, const ScenarioConfig& cfg, const EnergySettings& energy, const std::string& mode,
               const Point& pt, std::size_t index) {
  if (mode == "ga-sum" || mode == "ga-min" || mode == "ga-ee") {
    const std::string trace =
        pt.value ? "trace_" + mode + "_" + std::to_string(index) + ".csv" : "trace_" + mode + ".csv";
    run_ga(ctx, cfg, energy, mode, pt, trace);
    return;
  }
  const Scenario sc = build_scenario(cfg, ctx.opts.seed);
  const TransmitConfig tx = cfg.transmit();
  if (mode == "rate-closed") {
    const PhaseConfig phases = fixed_phases(sc, ctx.opts.seed);
    const RateBreakdown r = rate_theorem1(phases, sc.stats, sc.topology, tx);
    add_rates(ctx, pt, "rate_closed", r.rate);
    add_rates(ctx, pt, "rate_ris_free", rate_ris_free(sc.stats, sc.topology, tx));
    const EnergyModel em = energy.model(sc.topology);
    ctx.table.add({pt.var, pt.value, "ee", "", energy_efficiency(em, tx, r.rate, sc.topology, true), std::nullopt});
  } else if (mode == "rate-mc") {
    const PhaseConfig phases = fixed_phases(sc, ctx.opts.seed);
    const McRate r = mc_rate(sc.topology, sc.stats, phases, tx, ctx.opts.trials, ctx.opts.seed);
    add_rates(ctx, pt, "rate_mc", r.rate, &r.std_error);
  } else if (mode == "random") {
    const McRate r = mc_rate_random_phases(sc.topology, sc.stats, tx, ctx.opts.trials, ctx.opts.seed);
    add_rates(ctx, pt, "rate_mc_random", r.rate, &r.std_error);
    add_rates(ctx, pt, "rate_random_asymptotic", rate_random_phase_asymptotic(sc.stats, sc.topology, tx));
  } else {
    throw std::invalid_argument("unknown inner mode '" + mode + "'");
  }
}

void validate_moments(Context& ctx, const ScenarioConfig& cfg) {
  const Scenario sc = build_scenario(cfg, ctx.opts.seed);
  const PhaseConfig phases = fixed_phases(sc, ctx.opts.seed);
  const RateModel model(sc.topology, sc.stats);
  const Moments cf = model.moments(phases);
  const McMoments mc = mc_moments(sc.topology, sc.stats, phases, ctx.opts.trials, ctx.opts.seed);
  double worst = 0.0;
  auto add = [&](const std::string& name, const std::string& user, double closed, double sampled) {
    const double rel = std::abs(closed - sampled) / std::abs(sampled);
    worst = std::max(worst, rel);
    ctx.table.add({"", std::nullopt, name + "_closed", user, closed, std::nullopt});
    ctx.table.add({"", std::nullopt, name + "_mc", user, sampled, std::nullopt});
    ctx.table.add({"", std::nullopt, name + "_rel_error", user, rel, std::nullopt});
  };
  const std::size_t users = sc.topology.num_users();
  for (std::size_t k = 0; k < users; ++k) {
    add("e_noise", std::to_string(k), cf.e_noise[k], mc.e_noise[k]);
    add("e_signal", std::to_string(k), cf.e_signal[k], mc.e_signal[k]);
    for (std::size_t i = 0; i < users; ++i) {
      if (i != k) add("interference", std::to_string(k) + ":" + std::to_string(i), cf.interference(k, i), mc.interference(k, i));
    }
  }
  ctx.table.add({"", std::nullopt, "max_rel_error", "", worst, std::nullopt});
  ctx.log << "max relative error " << num(worst) << " over " << mc.trials << " trials\n";
}

void exhaustive(Context& ctx, const ScenarioConfig& cfg) {
  const Scenario sc = build_scenario(cfg, ctx.opts.seed);
  const TransmitConfig tx = cfg.transmit();
  const RateModel model(sc.topology, sc.stats);
  const SearchResult best =
      exhaustive_search(sum_rate_objective(model, tx), sc.topology.num_ris(), sc.topology.elements_per_ris, ctx.opts.bits);
  ctx.table.add({"", std::nullopt, "best_sum_rate", "", best.best_fitness, std::nullopt});
  ctx.table.add({"", std::nullopt, "configurations", "", static_cast<double>(best.evaluated), std::nullopt});
  const auto angles = best.best.angles();
  for (std::size_t g = 0; g < angles.size(); ++g) {
    ctx.table.add({"", std::nullopt, "phase", std::to_string(g), angles[g], std::nullopt});
  }
  ctx.log << "exhaustive optimum " << num(best.best_fitness) << " over " << best.evaluated << " configurations\n";
}

void timing(Context& ctx, const ScenarioConfig& cfg) {
  const Scenario sc = build_scenario(cfg, ctx.opts.seed);
  const TransmitConfig tx = cfg.transmit();
  const PhaseConfig phases = fixed_phases(sc, ctx.opts.seed);
  auto t0 = Clock::now();
  const RateBreakdown cf = rate_theorem1(phases, sc.stats, sc.topology, tx);
  const double closed = seconds_since(t0);
  t0 = Clock::now();
  const McRate mc = mc_rate(sc.topology, sc.stats, phases, tx, ctx.opts.trials, ctx.opts.seed);
  const double sampled = seconds_since(t0);
  ctx.table.add({"", std::nullopt, "closed_form_seconds", "", closed, std::nullopt});
  ctx.table.add({"", std::nullopt, "mc_seconds", "", sampled, std::nullopt});
  ctx.table.add({"", std::nullopt, "speedup", "", sampled / closed, std::nullopt});
  add_rates(ctx, {}, "rate_closed", cf.rate);
  add_rates(ctx, {}, "rate_mc", mc.rate, &mc.std_error);
  ctx.log << "closed form " << num(closed) << " s, MC " << num(sampled) << " s (" << ctx.opts.trials
          << " trials, " << worker_count() << " threads)\n";
}

nlohmann::json ga_json(const GAConfig& g) {
  return {{"S", g.population},  {"S_e", g.elites},     {"S_c", g.crossover},
          {"S_m", g.mutation},  {"p_m", g.mutation_prob}, {"max_iters", g.max_iters},
          {"tol", g.tol},       {"stall_generations", g.stall_generations}, {"phase_bits", g.phase_bits}};
}

}  // namespace

void ResultTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sweep_var,value,metric,user,estimate,stderr\n";
  for (const ResultRow& r : rows_) {
    out << r.sweep_var << ',' << (r.value ? num(*r.value) : "") << ',' << r.metric << ',' << r.user << ','
        << num(r.estimate) << ',' << (r.std_error ? num(*r.std_error) : "") << '\n';
  }
}

void apply_overrides(ScenarioConfig& cfg, const Overrides& o) {
  if (o.aps) cfg.ap_positions = extend_positions(cfg.ap_positions, as_count(static_cast<double>(*o.aps), "M"));
  if (o.ris) {
    cfg.ris_positions = *o.ris == 0 ? std::vector<Vec3>{} : extend_positions(cfg.ris_positions, *o.ris);
  }
  if (o.users) {
    if (!cfg.user_positions.empty() && cfg.user_positions.size() != *o.users) {
      throw std::invalid_argument("--K conflicts with the explicit user positions in the scenario");
    }
    cfg.num_users = as_count(static_cast<double>(*o.users), "K");
  }
  if (o.antennas) cfg.antennas_per_ap = as_square(static_cast<double>(*o.antennas), "M_b");
  if (o.elements) cfg.elements_per_ris = as_square(static_cast<double>(*o.elements), "N_r");
  if (o.power_dbm) {
    cfg.transmit_power_dbm = *o.power_dbm;
    cfg.user_power_dbm.clear();
  }
}

ScenarioConfig with_sweep_value(const ScenarioConfig& cfg, const std::string& var, double value) {
  ScenarioConfig out = cfg;
  if (var == "P") {
    out.transmit_power_dbm = value;
    out.user_power_dbm.clear();
  } else if (var == "N_r") {
    out.elements_per_ris = as_square(value, "N_r");
  } else if (var == "M_b") {
    out.antennas_per_ap = as_square(value, "M_b");
  } else if (var == "beta_RA") {
    out.exponents.ris_ap = value;
  } else if (var == "N") {
    out.ris_positions = extend_positions(cfg.ris_positions, as_count(value, "N"));
  } else if (var == "M") {
    out.ap_positions = extend_positions(cfg.ap_positions, as_count(value, "M"));
  } else {
    throw std::invalid_argument("unknown sweep variable '" + var + "'");
  }
  return out;
}

std::vector<double> sweep_points(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("sweep step must be positive");
  if (!(to >= from)) throw std::invalid_argument("empty sweep range");
  std::vector<double> pts;
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(from + static_cast<double>(i) * step);
  return pts;
}

void run(const RunOptions& opts, std::ostream& log) {
  const auto& modes = run_modes();
  if (std::find(modes.begin(), modes.end(), opts.mode) == modes.end()) {
    throw std::invalid_argument("unknown mode '" + opts.mode + "'");
  }
  if (opts.trials == 0) throw std::invalid_argument("--trials must be positive");
  GAConfig ga = opts.ga;
  ga.seed = opts.seed;
  ga.validate();
  std::filesystem::create_directories(opts.out_dir);

  ResultTable table;
  Context ctx{opts, table, log};
  const ScenarioConfig& cfg = opts.file.scenario;
  const auto t0 = Clock::now();
  if (opts.mode == "validate-moments") {
    validate_moments(ctx, cfg);
  } else if (opts.mode == "rate-mc" || opts.mode == "rate-closed" || opts.mode.rfind("ga-", 0) == 0) {
    run_point(ctx, cfg, opts.file.energy, opts.mode, {}, 0);
  } else if (opts.mode == "exhaustive") {
    exhaustive(ctx, cfg);
  } else if (opts.mode == "timing") {
    timing(ctx, cfg);
  } else {
    const auto& vars = sweep_vars();
    if (std::find(vars.begin(), vars.end(), opts.sweep_var) == vars.end()) {
      throw std::invalid_argument("unknown sweep variable '" + opts.sweep_var + "'");
    }
    const auto& inner = sweep_modes();
    if (std::find(inner.begin(), inner.end(), opts.inner_mode) == inner.end()) {
      throw std::invalid_argument("unknown sweep mode '" + opts.inner_mode + "'");
    }
    const std::vector<double> pts = sweep_points(opts.from, opts.to, opts.step);
    std::vector<ScenarioConfig> configs;
    for (const double v : pts) configs.push_back(with_sweep_value(cfg, opts.sweep_var, v));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      run_point(ctx, configs[i], opts.file.energy, opts.inner_mode, {opts.sweep_var, pts[i]}, i);
    }
  }
  const double elapsed = seconds_since(t0);
  table.write_csv(opts.out_dir / "results.csv");

  nlohmann::json run_json;
  run_json["mode"] = opts.mode;
  run_json["seed"] = opts.seed;
  run_json["trials"] = opts.trials;
  run_json["bits"] = opts.bits;
  run_json["ga"] = ga_json(ga);
  if (opts.mode == "sweep") {
    run_json["sweep"] = {
        {"var", opts.sweep_var}, {"from", opts.from}, {"to", opts.to}, {"step", opts.step}, {"mode", opts.inner_mode}};
  }
  run_json["scenario"] = nlohmann::json::parse(scenario_to_json(opts.file));
  run_json["versions"] = {{"rislab", RISLAB_VERSION}, {"compiler", __VERSION__}, {"cxx_standard", __cplusplus}};
  run_json["threads"] = worker_count();
  run_json["elapsed_seconds"] = elapsed;
  std::ofstream out(opts.out_dir / "run.json");
  if (!out) throw std::runtime_error("cannot write run.json");
  out << run_json.dump(2) << '\n';
}

}  // namespace rislab::cli
