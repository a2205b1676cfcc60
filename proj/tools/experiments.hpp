#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rislab/optimizer.hpp"
#include "rislab/scenario_io.hpp"

namespace rislab::cli {

struct ResultRow {
  std::string sweep_var;
  std::optional<double> value;
  std::string metric;
  std::string user;
  double estimate = 0.0;
  std::optional<double> std_error;
};

class ResultTable {
 public:
  void add(ResultRow row) { rows_.push_back(std::move(row)); }
  [[nodiscard]] const std::vector<ResultRow>& rows() const noexcept { return rows_; }
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<ResultRow> rows_;
};

struct Overrides {
  std::optional<std::size_t> aps;
  std::optional<std::size_t> ris;
  std::optional<std::size_t> users;
  std::optional<std::size_t> antennas;
  std::optional<std::size_t> elements;
  std::optional<double> power_dbm;
};

struct RunOptions {
  std::string mode;
  ScenarioFile file;
  std::uint64_t seed = 1;
  std::size_t trials = 100000;
  std::string inner_mode = "rate-closed";
  std::string sweep_var;
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  unsigned bits = 1;
  GAConfig ga;
  std::filesystem::path out_dir = "out";
};

inline const std::vector<std::string>& run_modes() {
  static const std::vector<std::string> modes = {"validate-moments", "rate-mc",   "rate-closed",
                                                 "ga-sum",           "ga-min",    "ga-ee",
                                                 "exhaustive",       "sweep",     "timing"};
  return modes;
}

inline const std::vector<std::string>& sweep_modes() {
  static const std::vector<std::string> modes = {"rate-closed", "rate-mc", "random", "ga-sum", "ga-min", "ga-ee"};
  return modes;
}

inline const std::vector<std::string>& sweep_vars() {
  static const std::vector<std::string> vars = {"P", "N_r", "M_b", "beta_RA", "N", "M"};
  return vars;
}

void apply_overrides(ScenarioConfig& cfg, const Overrides& o);

/// Sets one sweep variable on a copy of cfg.
ScenarioConfig with_sweep_value(const ScenarioConfig& cfg, const std::string& var, double value);

/// Points from..to inclusive. Throws on an empty range.
std::vector<double> sweep_points(double from, double to, double step);

/// Runs one mode, writes results.csv, run.json and traces under out_dir.
void run(const RunOptions& opts, std::ostream& log);

}  // namespace rislab::cli
