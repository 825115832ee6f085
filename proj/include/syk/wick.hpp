#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "syk/model.hpp"

namespace syk {

// (m-1)!! perfect matchings of m points (m even).
std::uint64_t pairing_count(int m);

// Visits every perfect matching of `points`, always pairing the smallest
// free element first and its partner in ascending order. Deterministic.
void for_each_pairing(const std::vector<int>& points,
                      const std::function<void(const std::vector<std::pair<int, int>>&)>& visit);

// Materialized matchings; refuses more than 12 points.
std::vector<std::vector<std::pair<int, int>>> enumerate_pairings(const std::vector<int>& points);

// Work estimate for the exact enumeration of a degree-m disorder average
// with M observable terms: sum over even k of
// C(m,k) (k-1)!! C(n,q)^{k/2} M^{m-k}.
double enumeration_size(int n, int q, int m, std::size_t n_obs_terms);

// Exact E tr(H^m) for H = H_0 + lambda O, by summing every Wick
// configuration: a disorder/observable flag per position, a perfect
// matching of the disorder positions (matched positions share a subset,
// each matched pair contributes one factor of Var J), one subset choice
// per pair, and one observable term per observable position.
double annealed_trace_moment(int n, int q, int m, const Observable* obs = nullptr,
                             double lambda = 0.0, double budget = 5e7);

// Whether cross-replica contractions participate.
enum class PairingScope { all, within_replica };

// Exact E[tr(H^{l1}) tr(H^{l2})] under one shared disorder realization.
// The position list is canonicalized to l1 <= l2, so (4,2) and (2,4) are
// bitwise identical. Restricting the scope to within_replica pairings
// factorizes the average into the product of the two one-replica averages.
double two_replica_moment(int n, int q, int l1, int l2, const Observable* obs = nullptr,
                          double lambda = 0.0, PairingScope scope = PairingScope::all,
                          double budget = 5e7);

// Same sum with an explicit position -> replica assignment (entries 0/1).
// The value does not depend on which positions carry which replica label,
// only on how many carry each — the sum over assignments divided by
// C(m, l1) reproduces two_replica_moment; tests probe this invariance.
double two_replica_moment_assigned(int n, int q, const std::vector<int>& replica,
                                   const Observable* obs = nullptr, double lambda = 0.0,
                                   PairingScope scope = PairingScope::all, double budget = 5e7);

// One fully resolved Wick configuration over two replicas.
struct WickConfiguration {
    int m = 0;
    std::vector<int> replica;                  // 0/1 per position
    std::vector<std::uint64_t> masks;          // resolved subset per position
    std::vector<std::pair<int, int>> pairs;    // matching of disorder positions
};

struct FactorizationCheck {
    cplx direct{0.0, 0.0};   // tr_0(ordered product) * tr_1(ordered product)
    cplx factored{0.0, 0.0}; // product over connected components
    int components = 0;
};

// Splits the positions into connected components of the mixed graph whose
// edges are same-replica support overlaps and cross-replica matched pairs,
// then compares the direct two-trace product against the product of
// per-component contributions. The two agree identically; the check
// exercises the commutation signs that make that true.
FactorizationCheck connected_factorization_check(int n, const WickConfiguration& cfg);

struct McStats {
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

// Monte Carlo over disorder: tr(H^m) per sampled instance (instance i uses
// seed + i), mean and standard error across samples.
McStats mc_trace_moment(int n, int q, int m, const Observable* obs, double lambda, int samples,
                        std::uint64_t seed, std::size_t term_cap = 0);

// Monte Carlo of tr(H^{l1}) tr(H^{l2}) under one shared realization.
McStats mc_two_replica(int n, int q, int l1, int l2, const Observable* obs, double lambda,
                       int samples, std::uint64_t seed, std::size_t term_cap = 0);

struct ConcentrationPoint {
    std::complex<double> beta{0.0, 0.0};
    std::complex<double> mean_z{0.0, 0.0};
    double variance = 0.0;  // unbiased sample variance of Z(beta)
    double ratio = 0.0;     // variance / |mean Z|^2
    double ratio_std_error = 0.0; // jackknife
    int samples = 0;
};

// Sampled relative fluctuation of Z(beta) at a (possibly complex) inverse
// temperature. Needs at least 100 samples for a meaningful jackknife.
ConcentrationPoint concentration_ratio(int n, int q, std::complex<double> beta, int samples,
                                       std::uint64_t seed, int dense_cap = 20);

} // namespace syk
