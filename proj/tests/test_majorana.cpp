#include <complex>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "syk/majorana.hpp"
#include "syk/rng.hpp"

using namespace syk;
using doctest::Approx;

namespace {
const cplx kI{0.0, 1.0};
} // namespace

TEST_CASE("canonical_phase is i^{k/2}") {
    CHECK(canonical_phase(0) == cplx{1.0, 0.0});
    CHECK(canonical_phase(2) == kI);
    CHECK(canonical_phase(4) == cplx{-1.0, 0.0});
    CHECK(canonical_phase(6) == -kI);
    CHECK(canonical_phase(8) == cplx{1.0, 0.0});
    CHECK(oracle::thrown_code([] { canonical_phase(3); }) == errc::invalid_parity);
}

TEST_CASE("make_string applies the Hermitian phase convention") {
    const MajoranaTerm empty = make_string({}, 8);
    CHECK(empty.mask == 0);
    CHECK(empty.coeff == cplx{1.0, 0.0});

    const MajoranaTerm s01 = make_string({0, 1}, 8);
    CHECK(s01.mask == 0b11);
    CHECK(s01.coeff == kI);

    const MajoranaTerm s0123 = make_string({0, 1, 2, 3}, 8);
    CHECK(s0123.mask == 0b1111);
    CHECK(s0123.coeff == cplx{-1.0, 0.0});

    CHECK(oracle::thrown_code([] { make_string({0}, 8); }) == errc::invalid_parity);
    CHECK(oracle::thrown_code([] { make_string({0, 8}, 8); }) == errc::index_out_of_range);
    CHECK(oracle::thrown_code([] { make_string({1, 0}, 8); }) == errc::domain_error);
}

TEST_CASE("term_product worked examples") {
    const int n = 8;
    const MajoranaTerm s12 = make_string({1, 2}, n);
    const MajoranaTerm s13 = make_string({1, 3}, n);
    const MajoranaTerm s34 = make_string({3, 4}, n);

    // psi_{12}^2 = (1/4) identity
    const MajoranaTerm sq = term_product(s12, s12);
    CHECK(sq.mask == 0);
    CHECK(sq.coeff == cplx{0.25, 0.0});

    // psi_{12} psi_{34} lands exactly on the canonical psi_{1234}
    const MajoranaTerm p = term_product(s12, s34);
    const MajoranaTerm canon = make_string({1, 2, 3, 4}, n);
    CHECK(p.mask == canon.mask);
    CHECK(p.coeff == canon.coeff);

    // psi_{12} psi_{13} = -(i/2) psi_{23}
    const MajoranaTerm r = term_product(s12, s13);
    const MajoranaTerm s23 = make_string({2, 3}, n);
    CHECK(r.mask == s23.mask);
    CHECK(r.coeff == -kI * 0.5 * s23.coeff);
    CHECK(r.coeff == cplx{0.5, 0.0});
}

TEST_CASE("bare generators anticommute: {psi_i, psi_j} = delta_ij") {
    const int n = 6;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const MajoranaTerm a{std::uint64_t{1} << i, {1.0, 0.0}};
            const MajoranaTerm b{std::uint64_t{1} << j, {1.0, 0.0}};
            const MajoranaTerm ab = term_product(a, b);
            const MajoranaTerm ba = term_product(b, a);
            if (i == j) {
                CHECK(ab.mask == 0);
                CHECK(ab.coeff + ba.coeff == cplx{1.0, 0.0});
            } else {
                CHECK(ab.mask == ba.mask);
                CHECK(ab.coeff + ba.coeff == cplx{0.0, 0.0});
            }
        }
}

TEST_CASE("term_product is exactly associative on random words") {
    // Coefficients are dyadic units, so every product is exact and the
    // comparison can demand bitwise equality.
    const cplx coeffs[6] = {{1, 0}, {-1, 0}, {0, 0.5}, {-0.25, 0}, {0, 2}, {0, 1}};
    const std::uint64_t full = (1u << 10) - 1;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        auto pick = [&](std::uint64_t salt) {
            return MajoranaTerm{mix64(trial, salt) & full, coeffs[mix64(trial, salt + 100) % 6]};
        };
        const MajoranaTerm a = pick(0), b = pick(1), c = pick(2);
        const MajoranaTerm left = term_product(term_product(a, b), c);
        const MajoranaTerm right = term_product(a, term_product(b, c));
        CHECK(left.mask == right.mask);
        CHECK(left.coeff == right.coeff);
    }
}

TEST_CASE("term_adjoint reverses the word and conjugates") {
    const MajoranaTerm id{0, {1.0, 0.0}};
    CHECK(term_adjoint(id).coeff == cplx{1.0, 0.0});

    const MajoranaTerm s12 = make_string({1, 2}, 8); // Hermitian by construction
    const MajoranaTerm adj = term_adjoint(s12);
    CHECK(adj.mask == s12.mask);
    CHECK(adj.coeff == s12.coeff);

    MajoranaTerm scaled = s12;
    scaled.coeff *= kI; // i * psi_{12} is anti-Hermitian
    const MajoranaTerm scaled_adj = term_adjoint(scaled);
    CHECK(scaled_adj.coeff == -kI * s12.coeff);

    // (ab)^dagger = b^dagger a^dagger, exactly
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const MajoranaTerm a{mix64(trial, 11) & 0xfff, {0.5, -0.25}};
        const MajoranaTerm b{mix64(trial, 12) & 0xfff, {-2.0, 1.0}};
        const MajoranaTerm lhs = term_adjoint(term_product(a, b));
        const MajoranaTerm rhs = term_product(term_adjoint(b), term_adjoint(a));
        CHECK(lhs.mask == rhs.mask);
        CHECK(lhs.coeff == rhs.coeff);
    }
}

TEST_CASE("from_terms canonicalizes: accumulation, zero drop, validation") {
    const MajoranaTerm s01 = make_string({0, 1}, 6);
    MajoranaTerm neg = s01;
    neg.coeff = -neg.coeff;
    const SparseOperator cancel = SparseOperator::from_terms(6, {s01, neg});
    CHECK(cancel.empty());

    const SparseOperator acc = SparseOperator::from_terms(6, {s01, s01});
    CHECK(acc.size() == 1);
    CHECK(acc.coeff(0b11) == 2.0 * s01.coeff);
    CHECK(acc.coeff(0b1111) == cplx{0.0, 0.0}); // absent mask reads as zero

    CHECK(oracle::thrown_code([] {
              SparseOperator::from_terms(6, {MajoranaTerm{0b111, {1.0, 0.0}}});
          }) == errc::invalid_parity);
    CHECK(oracle::thrown_code([] {
              SparseOperator::from_terms(6, {MajoranaTerm{std::uint64_t{0b11} << 6, {1.0, 0.0}}});
          }) == errc::index_out_of_range);
}

TEST_CASE("op_multiply: identity, squares, caps") {
    const SparseOperator b = oracle::random_even_op(8, 5, 31);
    CHECK(op_multiply(SparseOperator::identity(8), b) == b);
    CHECK(op_multiply(b, SparseOperator::identity(8)) == b);

    const double J = 0.75;
    MajoranaTerm t = make_string({1, 2}, 8);
    t.coeff *= J;
    const SparseOperator jpsi = SparseOperator::from_terms(8, {t});
    const SparseOperator sq = op_multiply(jpsi, jpsi);
    CHECK(sq == SparseOperator::identity(8).scaled(J * J / 4.0));

    CHECK(default_term_cap(10) == 1024);
    CHECK(default_term_cap(40) == (std::size_t{1} << 26));
    const SparseOperator wide = oracle::random_even_op(10, 6, 77);
    REQUIRE(wide.size() > 2);
    CHECK(oracle::thrown_code([&] { op_multiply(wide, SparseOperator::identity(10), 2); }) ==
          errc::result_too_large);
    CHECK(oracle::thrown_code([&] {
              op_multiply(wide, SparseOperator::identity(12));
          }) == errc::domain_error); // mode-count mismatch
}

TEST_CASE("normalized_trace reads the empty word") {
    CHECK(normalized_trace(SparseOperator::identity(8)) == cplx{1.0, 0.0});
    const SparseOperator s = SparseOperator::from_terms(8, {make_string({0, 1, 2, 3}, 8)});
    CHECK(normalized_trace(s) == cplx{0.0, 0.0});
    const SparseOperator s12 = SparseOperator::from_terms(8, {make_string({1, 2}, 8)});
    CHECK(normalized_trace(op_multiply(s12, s12)) == cplx{0.25, 0.0});
}

TEST_CASE("trace identities: cyclicity and the merged fast paths") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const SparseOperator a = oracle::random_even_op(10, 8, 1000 + trial);
        const SparseOperator b = oracle::random_even_op(10, 7, 2000 + trial);
        const cplx ab = normalized_trace(op_multiply(a, b));
        const cplx ba = normalized_trace(op_multiply(b, a));
        const double scale = std::max(1.0, std::abs(ab));
        CHECK(std::abs(ab - ba) <= 1e-12 * scale);
        CHECK(std::abs(trace_of_product(a, b) - ab) <= 1e-12 * scale);
        const cplx aa = normalized_trace(op_multiply(a, a));
        CHECK(std::abs(trace_of_square(a) - aa) <= 1e-12 * std::max(1.0, std::abs(aa)));
    }
}

TEST_CASE("parity closure: even operators multiply to even operators") {
    const SparseOperator a = oracle::random_even_op(10, 9, 404);
    const SparseOperator b = oracle::random_even_op(10, 9, 405);
    const SparseOperator ab = op_multiply(a, b);
    for (const auto& t : ab.terms()) CHECK(popcount64(t.mask) % 2 == 0);
}

TEST_CASE("every canonical 4-string on n=8 is Hermitian with square 2^{-4}") {
    const auto masks = qsubset_masks(8, 4);
    const SparseOperator expected = SparseOperator::identity(8).scaled(1.0 / 16.0);
    for (auto m : masks) {
        const SparseOperator s = SparseOperator::from_terms(8, {make_string(indices_of_mask(m), 8)});
        CHECK(s.adjoint() == s);
        CHECK(op_multiply(s, s) == expected);
    }
}

TEST_CASE("adjoint of an operator conjugate-transposes every term") {
    const SparseOperator a = oracle::random_even_op(10, 10, 512);
    const SparseOperator adj = a.adjoint();
    CHECK(adj.adjoint() == a);
    // (AB)^dagger = B^dagger A^dagger as operators
    const SparseOperator b = oracle::random_even_op(10, 6, 513);
    CHECK(op_multiply(a, b).adjoint() == op_multiply(b.adjoint(), a.adjoint()));
}

TEST_CASE("pruned drops small coefficients only when asked") {
    const SparseOperator a = SparseOperator::from_terms(
        6, {MajoranaTerm{0b11, {1e-8, 0.0}}, MajoranaTerm{0b1100, {1.0, 0.0}}});
    CHECK(a.size() == 2);
    const SparseOperator p = a.pruned(1e-6);
    CHECK(p.size() == 1);
    CHECK(p.coeff(0b1100) == cplx{1.0, 0.0});
}
