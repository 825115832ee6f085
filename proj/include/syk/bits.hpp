#pragma once

#include <cstdint>
#include <vector>

#include "syk/errors.hpp"

namespace syk {

inline int popcount64(std::uint64_t x) { return __builtin_popcountll(x); }

// All q-subsets of {0,...,n-1} as bitmasks, in colexicographic order.
// Colex order on index sets coincides with increasing numeric order of the
// masks, so the result is sorted as integers; enumeration uses Gosper's hack.
inline std::vector<std::uint64_t> qsubset_masks(int n, int q) {
    if (n < 1 || n > 62) fail(errc::index_out_of_range, "mode count n must be in [1, 62]");
    if (q < 0 || q > n) fail(errc::invalid_locality, "subset size q must be in [0, n]");
    std::vector<std::uint64_t> out;
    if (q == 0) {
        out.push_back(0);
        return out;
    }
    std::uint64_t v = (std::uint64_t{1} << q) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (v < limit) {
        out.push_back(v);
        std::uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (__builtin_ctzll(v) + 1));
    }
    return out;
}

// Exact binomial coefficient; n <= 62 keeps every value below 2^63.
inline std::uint64_t binomial_u64(int n, int k) {
    if (n < 0 || n > 62) fail(errc::index_out_of_range, "binomial_u64 needs 0 <= n <= 62");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t num = 1;
    for (int i = 1; i <= k; ++i) {
        // exact at every step: num * (n-k+i) / i divides evenly
        num = num * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return num;
}

// (k-1)!! as a double; number of perfect matchings on k points (k even >= 0).
inline double double_factorial_odd(int k) {
    if (k < 0 || (k % 2) != 0) fail(errc::invalid_parity, "matchings need an even point count");
    double out = 1.0;
    for (int j = k - 1; j >= 1; j -= 2) out *= static_cast<double>(j);
    return out;
}

inline std::vector<int> indices_of_mask(std::uint64_t mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(__builtin_ctzll(mask));
        mask &= mask - 1;
    }
    return out;
}

inline std::uint64_t mask_of_indices(const std::vector<int>& indices, int n) {
    std::uint64_t mask = 0;
    for (int i : indices) {
        if (i < 0 || i >= n) fail(errc::index_out_of_range, "site index outside [0, n)");
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (mask & bit) fail(errc::domain_error, "duplicate site index");
        mask |= bit;
    }
    return mask;
}

} // namespace syk
