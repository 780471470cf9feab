#pragma once

#include <cstdint>
#include <random>

namespace dbtsw {

using Engine = std::mt19937_64;

/// Deterministic seed handle. Child seeds are a pure function of
/// (master, stream), so any task can derive its own generator without
/// touching shared state.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  /// Seed for sub-task `index` of this stream. Children of distinct
  /// (master, stream, index) triples are statistically independent.
  [[nodiscard]] SeedSpec child(std::uint64_t index) const noexcept;

  /// Fresh generator for this seed.
  [[nodiscard]] Engine engine() const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Standard normal draw. Box-Muller on top of the raw engine so that the
/// sequence does not depend on the standard library's distribution code.
double standard_normal(Engine& rng);

/// Uniform draw on [lo, hi).
double uniform(Engine& rng, double lo, double hi);

}  // namespace dbtsw
