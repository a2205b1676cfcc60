#include "rislab/phase.hpp"

#include <cstdint>
#include <stdexcept>

#include "rislab/units.hpp"

namespace rislab {

PhaseConfig::PhaseConfig(std::size_t num_ris, std::size_t elements_per_ris)
    : num_ris_(num_ris), elements_(elements_per_ris), angles_(num_ris * elements_per_ris, 0.0) {}

PhaseConfig::PhaseConfig(std::size_t num_ris, std::size_t elements_per_ris, std::span<const double> angles)
    : PhaseConfig(num_ris, elements_per_ris) {
  if (angles.size() != angles_.size()) throw std::invalid_argument("phase vector has wrong length");
  for (std::size_t i = 0; i < angles.size(); ++i) angles_[i] = wrap_angle(angles[i]);
}

void PhaseConfig::set(std::size_t n, std::size_t r, double theta) {
  if (n >= num_ris_ || r >= elements_) throw std::out_of_range("phase index out of range");
  angles_[n * elements_ + r] = wrap_angle(theta);
}

double random_phase(Rng& rng, unsigned bits) {
  if (bits == 0) return uniform_angle(rng);
  if (bits > 16) throw std::invalid_argument("phase resolution above 16 bits");
  const std::uint64_t levels = std::uint64_t{1} << bits;
  std::uniform_int_distribution<std::uint64_t> level(0, levels - 1);
  return two_pi * static_cast<double>(level(rng)) / static_cast<double>(levels);
}

PhaseConfig random_phases(std::size_t num_ris, std::size_t elements_per_ris, Rng& rng, unsigned bits) {
  std::vector<double> angles(num_ris * elements_per_ris);
  for (double& a : angles) a = random_phase(rng, bits);
  return PhaseConfig(num_ris, elements_per_ris, angles);
}

}  // namespace rislab
