#include <algorithm>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "syk/bits.hpp"

using namespace syk;

TEST_CASE("binomial_u64 matches a Pascal-triangle oracle on the full range") {
    std::vector<std::vector<std::uint64_t>> row(63);
    for (int n = 0; n <= 62; ++n) {
        row[n].assign(static_cast<std::size_t>(n) + 1, 1);
        for (int k = 1; k < n; ++k) row[n][k] = row[n - 1][k - 1] + row[n - 1][k];
    }
    for (int n = 0; n <= 62; ++n)
        for (int k = 0; k <= n; ++k) {
            if (binomial_u64(n, k) != row[n][k]) {
                CHECK(binomial_u64(n, k) == row[n][k]); // report only failures
            }
        }
    CHECK(binomial_u64(8, 4) == 70);
    CHECK(binomial_u64(12, 4) == 495);
    CHECK(binomial_u64(20, 10) == 184756);
    CHECK(binomial_u64(5, 7) == 0);
    CHECK(binomial_u64(10, -1) == 0);
    CHECK(oracle::thrown_code([] { binomial_u64(63, 1); }) == errc::index_out_of_range);
}

TEST_CASE("qsubset_masks enumerates colexicographically (= increasing masks)") {
    const auto m42 = qsubset_masks(4, 2);
    CHECK(m42 == std::vector<std::uint64_t>{3, 5, 6, 9, 10, 12});

    const auto m84 = qsubset_masks(8, 4);
    CHECK(m84.size() == 70);
    CHECK(std::is_sorted(m84.begin(), m84.end()));
    CHECK(m84.front() == 0b1111);
    CHECK(m84.back() == std::uint64_t{0b1111} << 4);
    for (auto m : m84) CHECK(popcount64(m) == 4);

    CHECK(qsubset_masks(6, 0) == std::vector<std::uint64_t>{0});
    CHECK(qsubset_masks(6, 6).size() == 1);
    CHECK(oracle::thrown_code([] { qsubset_masks(63, 2); }) == errc::index_out_of_range);
    CHECK(oracle::thrown_code([] { qsubset_masks(6, 7); }) == errc::invalid_locality);
}

TEST_CASE("double_factorial_odd counts perfect matchings") {
    CHECK(double_factorial_odd(0) == 1.0);
    CHECK(double_factorial_odd(2) == 1.0);
    CHECK(double_factorial_odd(4) == 3.0);
    CHECK(double_factorial_odd(8) == 105.0);
    CHECK(double_factorial_odd(12) == 10395.0);
    CHECK(oracle::thrown_code([] { double_factorial_odd(3); }) == errc::invalid_parity);
}

TEST_CASE("mask <-> index-list conversions round-trip") {
    const std::vector<int> idx{0, 3, 5, 9};
    const std::uint64_t mask = mask_of_indices(idx, 12);
    CHECK(mask == ((1u << 0) | (1u << 3) | (1u << 5) | (1u << 9)));
    CHECK(indices_of_mask(mask) == idx);
    CHECK(indices_of_mask(0).empty());
    CHECK(oracle::thrown_code([] { mask_of_indices({0, 12}, 12); }) == errc::index_out_of_range);
    CHECK(oracle::thrown_code([] { mask_of_indices({3, 3}, 12); }) == errc::domain_error);
}
