#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "syk/dense.hpp"
#include "syk/model.hpp"
#include "syk/moments.hpp"

using namespace syk;
using doctest::Approx;

TEST_CASE("power traces of c*identity are c^r") {
    const auto op = SparseOperator::identity(6).scaled(0.7);
    const MomentSequence m = power_trace_sequence(op, 8);
    REQUIRE(m.order() == 8);
    CHECK(m.mu[0] == 1.0);
    for (int r = 1; r <= 8; ++r) CHECK(m.mu[r] == Approx(std::pow(0.7, r)).epsilon(1e-14));
}

TEST_CASE("single-string Hamiltonian has closed-form moments") {
    // H = J * psi_{0123}; H^2 = J^2/16 identity, so mu alternates (J^2/16)^{r/2} and 0.
    MajoranaTerm t = make_string({0, 1, 2, 3}, 8);
    t.coeff *= 2.0;
    const auto h = SparseOperator::from_terms(8, {t});
    const MomentSequence m = power_trace_sequence(h, 4);
    REQUIRE(m.order() == 4);
    CHECK(m.mu[0] == 1.0);
    CHECK(m.mu[1] == 0.0);
    CHECK(m.mu[2] == Approx(0.25).epsilon(1e-15));
    CHECK(m.mu[3] == 0.0);
    CHECK(m.mu[4] == Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("sparse power traces agree with dense matrix powers") {
    const SykInstance inst = sample_instance(10, 4, 3);
    const SparseOperator h = build_hamiltonian(inst);
    const MomentSequence m = power_trace_sequence(h, 10);
    const std::vector<double> ref = oracle::dense_power_traces(h, 10);
    REQUIRE(m.order() == 10);
    for (int r = 0; r <= 10; ++r) {
        const double scale = std::max(1.0, std::abs(ref[r]));
        CHECK(std::abs(m.mu[r] - ref[r]) <= 1e-10 * scale);
    }
    CHECK(m.max_imag_residue <= 1e-12);
}

TEST_CASE("sparse power traces agree with dense for a perturbed Hamiltonian") {
    const SykInstance inst = sample_instance(8, 4, 11);
    const Observable obs = Observable::from_indices(8, {{{0, 1}, 0.5}, {{2, 3, 4, 5}, -0.25}});
    const SparseOperator h = build_hamiltonian(inst, &obs, 0.3);
    const MomentSequence m = power_trace_sequence(h, 8);
    const std::vector<double> ref = oracle::dense_power_traces(h, 8);
    for (int r = 0; r <= 8; ++r) {
        const double scale = std::max(1.0, std::abs(ref[r]));
        CHECK(std::abs(m.mu[r] - ref[r]) <= 1e-10 * scale);
    }
}

TEST_CASE("moment sequence passes the Hamburger positivity check") {
    // For a real spectral measure every Hankel matrix H_{ij} = mu_{i+j} is PSD.
    const SykInstance inst = sample_instance(8, 4, 2);
    const MomentSequence m = power_trace_sequence(build_hamiltonian(inst), 10);
    Eigen::MatrixXd hankel(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) hankel(i, j) = m.mu[i + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hankel);
    REQUIRE(es.info() == Eigen::Success);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("moments transform covariantly under H -> cH") {
    const SykInstance inst = sample_instance(8, 4, 5);
    const SparseOperator h = build_hamiltonian(inst);
    const MomentSequence m1 = power_trace_sequence(h, 6);
    const MomentSequence m2 = power_trace_sequence(h.scaled(2.0), 6);
    for (int r = 0; r <= 6; ++r)
        CHECK(m2.mu[r] == std::ldexp(m1.mu[r], r)); // exact: scaling by 2^r commutes with rounding
}

TEST_CASE("non-Hermitian input is rejected as contamination") {
    const auto bad = SparseOperator::from_terms(4, {{0b11ull, std::complex<double>(1.0, 1.0)}});
    CHECK(oracle::thrown_code([&] { power_trace_sequence(bad, 4); }) ==
          errc::numerical_contamination);
}

TEST_CASE("CSV rendering carries 17 significant digits or hex floats") {
    MomentSequence m;
    m.mu = {1.0, 0.0, 0.05126953125};
    const std::string plain = format_moments_csv(m);
    CHECK(plain.find("r,mu_r") == 0);
    CHECK(plain.find("0.05126953125") != std::string::npos);
    const std::string hex = format_moments_csv(m, true);
    CHECK(hex.find("0x1") != std::string::npos);
    // hex floats parse back to identical bits
    const std::size_t pos = hex.rfind(',');
    const double back = std::strtod(hex.c_str() + pos + 1, nullptr);
    CHECK(back == 0.05126953125);
}
