#pragma once

#include <cstdint>
#include <random>

namespace tracelab {

/// The engine output is fixed by the standard, so streams are reproducible across platforms.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection, independent of library distribution internals.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

/// Independent stream number `index` derived from a master seed.
inline Rng split_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace tracelab
