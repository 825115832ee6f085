#pragma once

#include <cstdint>
#include <utility>

namespace syk {

// Stateless counter-based generator built on the splitmix64 finalizer.
// Every draw is a pure function of (seed, counter), so coupling i of a
// disorder instance is identical no matter how or where it is evaluated.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter);

// Uniform on (0,1]: 53-bit mantissa, never returns 0 (safe under log).
double uniform_open(std::uint64_t seed, std::uint64_t counter);

// Uniform on [0,1).
double uniform_half_open(std::uint64_t seed, std::uint64_t counter);

// Box-Muller pair N(0,1)^2 from counters (2*pair_index, 2*pair_index + 1).
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t pair_index);

// i-th standard normal in the stream: element (i & 1) of pair i >> 1.
double normal_at(std::uint64_t seed, std::uint64_t i);

} // namespace syk
