#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "syk/majorana.hpp"

namespace syk {

// Dense matrix form of an n-mode operator on n/2 qubits (dim = 2^{n/2}).
struct DenseOperator {
    int n = 0;
    Eigen::MatrixXcd mat;
};

// phase * X^x Z^z acting on computational basis states by
//   X^x Z^z |c> = (-1)^{popcount(z & c)} |c ^ x>.
struct PauliRep {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    cplx phase{1.0, 0.0};
};

// Jordan-Wigner image of the ascending Majorana word for `mask`:
//   psi_{2k}   = 2^{-1/2} (Z_0...Z_{k-1}) X_k
//   psi_{2k+1} = 2^{-1/2} (Z_0...Z_{k-1}) Y_k
PauliRep pauli_of_mask(std::uint64_t mask, int n_modes);

// Builds the full matrix; refuses n > dense_cap (too_large_for_dense).
DenseOperator to_dense(const SparseOperator& op, int dense_cap = 20);

struct Spectrum {
    Eigen::VectorXd energies; // ascending
    Eigen::MatrixXcd basis;   // columns are eigenvectors
};

// Full eigendecomposition; verifies the matrix is Hermitian first.
Spectrum eigendecompose(const DenseOperator& dense);

// All eigenvalues, ascending. Parity-even operators commute with the total
// Z parity, so the matrix splits into two blocks of half the dimension;
// this is roughly 4x faster than the full solve and is what the spectral
// scans use.
Eigen::VectorXd blocked_eigenvalues(const SparseOperator& op, int dense_cap = 24);

// Normalized partition function Z(beta) = 2^{-n/2} sum_i exp(-beta E_i);
// accepts complex beta for scans into the complex-temperature plane.
cplx partition_function(const Spectrum& spec, cplx beta);
cplx partition_function(const SparseOperator& op, cplx beta, int dense_cap = 20);

// log Z(beta) for real beta, shifted so it is stable for any spectrum size.
double log_partition(const Spectrum& spec, double beta);

// Largest |eigenvalue| of a (Hermitian) parity-even operator.
double spectral_norm(const SparseOperator& op, int dense_cap = 24);

// Thermal state rho = exp(-beta H) / Tr exp(-beta H), built with shifted
// weights so large spectra cannot overflow.
Eigen::MatrixXcd gibbs_state(const Spectrum& spec, double beta);

// <O>_beta = Tr(rho O), real part (Hermitian observables only).
double gibbs_expectation(const Spectrum& spec, const DenseOperator& obs, double beta);

// Tr(rho * dense(word_mask)) without materializing the word's matrix.
cplx pauli_expectation(const Eigen::MatrixXcd& rho, std::uint64_t mask, int n_modes);

} // namespace syk
