#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rfcca {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable derivation of independent substream seeds. The result depends only
// on the arguments, never on call order, so adding a stream never shifts
// another one.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value);

}  // namespace rfcca
