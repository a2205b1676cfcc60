#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rislab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a master seed and a label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0) noexcept;

Rng make_stream(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// Uniform draw on [0, 2pi).
double uniform_angle(Rng& rng);

/// Uniform draw on [0, 1).
double uniform_unit(Rng& rng);

}  // namespace rislab
