#pragma once

// Seed derivation and Poisson sampling. Every independent unit of work
// (a grid row, a Monte-Carlo trial) gets its own engine keyed from the
// master seed, so results do not depend on scheduling or thread count.

#include <cstdint>
#include <random>
#include <span>

namespace biphoton {

/// Name recorded in outputs next to the seed.
inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64-row-keys/boost-poisson";

std::uint64_t splitmix64(std::uint64_t x);
/// Key for stream `index` of the master seed `seed` under domain `domain`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain, std::uint64_t index);

using Engine = std::mt19937_64;

/// Independent Poisson draws, one per mean, from `engine`. Non-positive
/// means give 0 without consuming randomness.
void poisson_fill(Engine& engine, std::span<const double> means, std::span<std::uint64_t> out);

}  // namespace biphoton
