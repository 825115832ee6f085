#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "syk/bits.hpp"
#include "syk/errors.hpp"

namespace syk {

using cplx = std::complex<double>;

// One signed Majorana string:  coeff * psi_{i1} psi_{i2} ... psi_{ik}
// where i1 < i2 < ... < ik are the set bits of `mask`.
//
// Normalization: {psi_i, psi_j} = delta_{ij}, so psi_i^2 = 1/2 and the
// canonical Hermitian string psi_I = i^{|I|/2} psi_{i1}...psi_{ik} squares
// to 2^{-|I|} times the identity.
struct MajoranaTerm {
    std::uint64_t mask = 0;
    cplx coeff{0.0, 0.0};
};

// i^{k/2} for even k: the phase that makes the canonical string Hermitian.
cplx canonical_phase(int k);

// Canonical Hermitian string on an ascending even-cardinality index set.
MajoranaTerm make_string(const std::vector<int>& indices, int n_modes);

// Product of two strings in canonical (ascending) form. The sign counts the
// transpositions needed to merge the two ascending words; each shared index
// contracts through psi_i^2 = 1/2 and leaves the symmetric difference.
MajoranaTerm term_product(const MajoranaTerm& a, const MajoranaTerm& b);

// (c * word)^dagger = conj(c) * reversed word; reversing k distinct
// generators costs (-1)^{k(k-1)/2}.
MajoranaTerm term_adjoint(const MajoranaTerm& t);

// Sign of reordering the concatenation of two ascending words into one
// ascending word (contractions included). Exposed for the dense oracle.
double merge_sign(std::uint64_t a_mask, std::uint64_t b_mask);

// Sparse self-adjoint-friendly operator: sorted (mask -> coeff) pairs over
// even-popcount masks, zero coefficients dropped. Masks are kept in
// increasing numeric order, which makes every iteration deterministic.
class SparseOperator {
  public:
    SparseOperator() = default;
    explicit SparseOperator(int n_modes);

    static SparseOperator identity(int n_modes);
    // Normalizes: sorts by mask, accumulates duplicates, drops exact zeros.
    // Enforces parity closure (every mask has even popcount).
    static SparseOperator from_terms(int n_modes, const std::vector<MajoranaTerm>& terms);

    int modes() const { return n_; }
    const std::vector<MajoranaTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    cplx coeff(std::uint64_t mask) const; // 0 if absent

    SparseOperator adjoint() const;
    SparseOperator scaled(cplx c) const;
    // Drops terms with |coeff| < threshold (exploratory use only).
    SparseOperator pruned(double threshold) const;

    bool operator==(const SparseOperator& o) const;

  private:
    int n_ = 0;
    std::vector<MajoranaTerm> terms_;
};

// Default distinct-mask cap for products: min(2^n, 2^26).
std::size_t default_term_cap(int n_modes);

// Operator product. term_cap = 0 means default_term_cap(n); exceeding the
// cap raises result_too_large carrying the count.
SparseOperator op_multiply(const SparseOperator& a, const SparseOperator& b,
                           std::size_t term_cap = 0);

// Normalized trace tr = 2^{-n/2} Tr: the coefficient of the empty word.
cplx normalized_trace(const SparseOperator& a);

// tr(A*A) evaluated termwise: tr(word_m word_{m'}) vanishes unless m = m',
// and word_m^2 = (-1)^{k(k-1)/2} 2^{-k} with k = popcount(m).
cplx trace_of_square(const SparseOperator& a);

// tr(A*B) by the same orthogonality (merge over shared masks).
cplx trace_of_product(const SparseOperator& a, const SparseOperator& b);

} // namespace syk
