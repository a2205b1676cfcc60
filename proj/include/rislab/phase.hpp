#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rislab/rng.hpp"

namespace rislab {

/// RIS phase shifts, one angle per (surface, element), kept in [0, 2pi).
/// Flat order puts element r of surface n at n * elements + r.
class PhaseConfig {
 public:
  PhaseConfig() = default;
  PhaseConfig(std::size_t num_ris, std::size_t elements_per_ris);
  PhaseConfig(std::size_t num_ris, std::size_t elements_per_ris, std::span<const double> angles);

  [[nodiscard]] std::size_t num_ris() const noexcept { return num_ris_; }
  [[nodiscard]] std::size_t elements_per_ris() const noexcept { return elements_; }
  [[nodiscard]] std::size_t size() const noexcept { return angles_.size(); }

  [[nodiscard]] double operator()(std::size_t n, std::size_t r) const { return angles_[n * elements_ + r]; }
  void set(std::size_t n, std::size_t r, double theta);

  [[nodiscard]] std::span<const double> angles() const noexcept { return angles_; }

  bool operator==(const PhaseConfig&) const = default;

 private:
  std::size_t num_ris_ = 0;
  std::size_t elements_ = 0;
  std::vector<double> angles_;
};

/// Uniform phase on [0, 2pi), or on the 2^bits grid when bits > 0.
double random_phase(Rng& rng, unsigned bits = 0);
PhaseConfig random_phases(std::size_t num_ris, std::size_t elements_per_ris, Rng& rng, unsigned bits = 0);

}  // namespace rislab
