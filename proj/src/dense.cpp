#include "syk/dense.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "syk/bits.hpp"
#include "syk/errors.hpp"

namespace syk {

namespace {

void require_dense_size(int n_modes, int dense_cap) {
    if (n_modes % 2 != 0)
        fail(errc::invalid_parity, "dense mapping needs an even mode count, got " +
                                       std::to_string(n_modes));
    if (n_modes > dense_cap)
        fail(errc::too_large_for_dense,
             "n=" + std::to_string(n_modes) + " exceeds dense cap " + std::to_string(dense_cap));
}

void require_hermitian(const Eigen::MatrixXcd& m, const char* what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-10 * scale)
        fail(errc::domain_error, std::string(what) + ": matrix is not Hermitian (deviation " +
                                     std::to_string(dev) + ")");
}

} // namespace

PauliRep pauli_of_mask(std::uint64_t mask, int n_modes) {
    if (n_modes % 2 != 0 || n_modes < 2 || n_modes > 62)
        fail(errc::invalid_parity, "mode count must be even and in [2,62]");
    if (mask >> n_modes)
        fail(errc::index_out_of_range, "mask uses modes beyond n=" + std::to_string(n_modes));
    PauliRep rep;
    int i_count = 0;   // factors of i from Y = i X Z
    int sign_parity = 0;
    const int k = popcount64(mask);
    std::uint64_t rest = mask;
    while (rest) {
        const int idx = __builtin_ctzll(rest);
        rest &= rest - 1;
        const int qubit = idx / 2;
        const std::uint64_t gx = 1ull << qubit;
        const std::uint64_t gz = (idx % 2) ? ((2ull << qubit) - 1) : ((1ull << qubit) - 1);
        if (idx % 2) ++i_count;
        sign_parity ^= popcount64(rep.z & gx) & 1;
        rep.x ^= gx;
        rep.z ^= gz;
    }
    static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cplx phase = i_pow[i_count % 4];
    if (sign_parity) phase = -phase;
    // overall 2^{-k/2} from the generator normalization
    if (k % 2 == 0)
        phase *= std::ldexp(1.0, -k / 2);
    else
        phase *= std::ldexp(std::sqrt(0.5), -(k - 1) / 2);
    rep.phase = phase;
    return rep;
}

DenseOperator to_dense(const SparseOperator& op, int dense_cap) {
    require_dense_size(op.modes(), dense_cap);
    const std::int64_t dim = std::int64_t{1} << (op.modes() / 2);
    DenseOperator out;
    out.n = op.modes();
    out.mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& term : op.terms()) {
        const PauliRep rep = pauli_of_mask(term.mask, op.modes());
        const cplx amp = term.coeff * rep.phase;
        for (std::int64_t c = 0; c < dim; ++c) {
            const double sign = (popcount64(rep.z & static_cast<std::uint64_t>(c)) & 1) ? -1.0 : 1.0;
            out.mat(static_cast<std::int64_t>(c ^ static_cast<std::int64_t>(rep.x)), c) += amp * sign;
        }
    }
    return out;
}

Spectrum eigendecompose(const DenseOperator& dense) {
    require_hermitian(dense.mat, "eigendecompose");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense.mat);
    if (solver.info() != Eigen::Success)
        fail(errc::numerical_contamination, "eigensolver did not converge");
    return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd blocked_eigenvalues(const SparseOperator& op, int dense_cap) {
    require_dense_size(op.modes(), dense_cap);
    const int qubits = op.modes() / 2;
    const std::int64_t dim = std::int64_t{1} << qubits;
    const std::int64_t half = dim / 2;

    // Index the computational basis by total-Z parity. Parity-even masks
    // always move states within their parity sector.
    std::vector<std::int64_t> slot(static_cast<std::size_t>(dim));
    std::vector<std::vector<std::int64_t>> sector(2);
    sector[0].reserve(static_cast<std::size_t>(half));
    sector[1].reserve(static_cast<std::size_t>(half));
    for (std::int64_t c = 0; c < dim; ++c) {
        const int p = popcount64(static_cast<std::uint64_t>(c)) & 1;
        slot[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(sector[p].size());
        sector[p].push_back(c);
    }

    Eigen::VectorXd all(dim);
    std::int64_t filled = 0;
    for (int p = 0; p < 2; ++p) {
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(half, half);
        for (const auto& term : op.terms()) {
            const PauliRep rep = pauli_of_mask(term.mask, op.modes());
            if (popcount64(rep.x) & 1)
                fail(errc::invalid_parity, "parity blocking requires even X support");
            const cplx amp = term.coeff * rep.phase;
            for (std::int64_t col = 0; col < half; ++col) {
                const std::uint64_t c = static_cast<std::uint64_t>(sector[p][static_cast<std::size_t>(col)]);
                const std::int64_t row = slot[static_cast<std::size_t>(c ^ rep.x)];
                const double sign = (popcount64(rep.z & c) & 1) ? -1.0 : 1.0;
                block(row, col) += amp * sign;
            }
        }
        require_hermitian(block, "blocked_eigenvalues");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            fail(errc::numerical_contamination, "eigensolver did not converge");
        all.segment(filled, half) = solver.eigenvalues();
        filled += half;
    }
    std::sort(all.data(), all.data() + all.size());
    return all;
}

cplx partition_function(const Spectrum& spec, cplx beta) {
    const double dim = static_cast<double>(spec.energies.size());
    cplx total{0.0, 0.0};
    for (Eigen::Index i = 0; i < spec.energies.size(); ++i)
        total += std::exp(-beta * spec.energies[i]);
    return total / dim;
}

cplx partition_function(const SparseOperator& op, cplx beta, int dense_cap) {
    const Eigen::VectorXd evals = blocked_eigenvalues(op, dense_cap);
    const double dim = static_cast<double>(evals.size());
    cplx total{0.0, 0.0};
    for (Eigen::Index i = 0; i < evals.size(); ++i) total += std::exp(-beta * evals[i]);
    return total / dim;
}

double log_partition(const Spectrum& spec, double beta) {
    const Eigen::Index dim = spec.energies.size();
    const double shift = beta >= 0 ? spec.energies.minCoeff() : spec.energies.maxCoeff();
    double total = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) total += std::exp(-beta * (spec.energies[i] - shift));
    return -beta * shift + std::log(total / static_cast<double>(dim));
}

double spectral_norm(const SparseOperator& op, int dense_cap) {
    if (op.empty()) return 0.0;
    const Eigen::VectorXd evals = blocked_eigenvalues(op, dense_cap);
    return std::max(std::abs(evals[0]), std::abs(evals[evals.size() - 1]));
}

Eigen::MatrixXcd gibbs_state(const Spectrum& spec, double beta) {
    const Eigen::Index dim = spec.energies.size();
    const double shift = beta >= 0 ? spec.energies.minCoeff() : spec.energies.maxCoeff();
    Eigen::VectorXd w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w[i] = std::exp(-beta * (spec.energies[i] - shift));
    w /= w.sum();
    return spec.basis * w.asDiagonal() * spec.basis.adjoint();
}

double gibbs_expectation(const Spectrum& spec, const DenseOperator& obs, double beta) {
    const Eigen::Index dim = spec.energies.size();
    if (obs.mat.rows() != dim)
        fail(errc::domain_error, "observable dimension does not match spectrum");
    const double shift = beta >= 0 ? spec.energies.minCoeff() : spec.energies.maxCoeff();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double w = std::exp(-beta * (spec.energies[i] - shift));
        const cplx diag = spec.basis.col(i).adjoint() * obs.mat * spec.basis.col(i);
        num += w * diag.real();
        den += w;
    }
    return num / den;
}

static cplx pauli_expectation_impl(const Eigen::MatrixXcd& rho, const PauliRep& rep) {
    const std::int64_t dim = rho.rows();
    cplx total{0.0, 0.0};
    for (std::int64_t c = 0; c < dim; ++c) {
        const double sign = (popcount64(rep.z & static_cast<std::uint64_t>(c)) & 1) ? -1.0 : 1.0;
        total += sign * rho(c, static_cast<std::int64_t>(static_cast<std::uint64_t>(c) ^ rep.x));
    }
    return rep.phase * total;
}

cplx pauli_expectation(const Eigen::MatrixXcd& rho, std::uint64_t mask, int n_modes) {
    const std::int64_t dim = std::int64_t{1} << (n_modes / 2);
    if (rho.rows() != dim || rho.cols() != dim)
        fail(errc::domain_error, "density matrix dimension does not match mode count");
    return pauli_expectation_impl(rho, pauli_of_mask(mask, n_modes));
}

} // namespace syk
