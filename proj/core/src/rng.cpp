#include "dbtsw/rng.hpp"

#include <cmath>
#include <numbers>

namespace dbtsw {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t mix(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace

SeedSpec SeedSpec::child(std::uint64_t index) const noexcept {
  return SeedSpec{mix(master, stream), index};
}

Engine SeedSpec::engine() const noexcept {
  const std::uint64_t s = mix(master, stream);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Engine(seq);
}

namespace {

// 53 random bits -> [0, 1).
double unit_interval(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double standard_normal(Engine& rng) {
  // (0, 1] avoids log(0).
  const double u1 = 1.0 - unit_interval(rng);
  const double u2 = unit_interval(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(Engine& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_interval(rng);
}

}  // namespace dbtsw
