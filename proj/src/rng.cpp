#include "syk/rng.hpp"

#include <cmath>

namespace syk {

std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform_open(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>((mix64(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

double uniform_half_open(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix64(seed, counter) >> 11) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t pair_index) {
    const double u1 = uniform_open(seed, 2 * pair_index);
    const double u2 = uniform_half_open(seed, 2 * pair_index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

double normal_at(std::uint64_t seed, std::uint64_t i) {
    const auto [z0, z1] = normal_pair(seed, i >> 1);
    return (i & 1) ? z1 : z0;
}

} // namespace syk
