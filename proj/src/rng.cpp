#include "rislab/rng.hpp"

#include "rislab/units.hpp"

namespace rislab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master) ^ splitmix64(h) ^ splitmix64(index ^ 0x5851f42d4c957f2dULL));
}

Rng make_stream(std::uint64_t master, std::string_view label, std::uint64_t index) {
  return Rng(derive_seed(master, label, index));
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_angle(Rng& rng) { return wrap_angle(two_pi * uniform_unit(rng)); }

}  // namespace rislab
