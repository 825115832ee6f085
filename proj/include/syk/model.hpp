#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "syk/majorana.hpp"

namespace syk {

// One disorder realization: couplings J_I over all q-subsets of [n] in
// colexicographic (= increasing mask) order.
struct SykInstance {
    int n = 0;
    int q = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> masks;
    std::vector<double> couplings;
};

// Var J_I = (q-1)! / n^{q-1}.
double coupling_variance(int n, int q);

// Draws J_I = sigma * N(0,1), coupling i from stream position i of `seed`.
// q must be even and >= 2; q = 2 is quadratic (free) and outside the regime
// the estimator guarantees cover, so it warns once per process on stderr.
SykInstance sample_instance(int n, int q, std::uint64_t seed);

// Same subset layout, all couplings zero (for control Hamiltonians).
SykInstance zero_instance(int n, int q);

// Few-body perturbation O = sum_a c_a psi_{A_a}: real coefficients on
// even-cardinality index sets.
class Observable {
  public:
    Observable() = default;
    Observable(int n_modes, std::vector<std::uint64_t> masks, std::vector<double> coeffs);
    static Observable from_indices(int n_modes,
                                   const std::vector<std::pair<std::vector<int>, double>>& terms);

    int modes() const { return n_; }
    const std::vector<std::uint64_t>& masks() const { return masks_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::size_t size() const { return masks_.size(); }
    bool empty() const { return masks_.empty(); }

    // Gamma = max over modes x of sum_{a : x in A_a} |c_a|.
    double gamma() const { return gamma_; }
    // L = max_a |A_a| (even; 0 for an empty observable).
    int locality() const { return locality_; }

    SparseOperator to_operator() const;

  private:
    int n_ = 0;
    std::vector<std::uint64_t> masks_;
    std::vector<double> coeffs_;
    double gamma_ = 0.0;
    int locality_ = 0;
};

// H = H_0 + lambda * O as a canonical sparse operator. Pass obs = nullptr
// (or lambda = 0) for the bare model.
SparseOperator build_hamiltonian(const SykInstance& inst, const Observable* obs = nullptr,
                                 double lambda = 0.0);

// Text formats (exact hex-float coefficients):
//   instance:    "n q seed" header, then one "i1,...,iq <coupling>" line per
//                subset in colex order (all C(n,q) subsets, strict).
//   observable:  "n m" header, then m lines "i1,...,ik <coeff>".
std::string format_instance(const SykInstance& inst);
SykInstance parse_instance(const std::string& text);
void save_instance(const SykInstance& inst, const std::string& path);
SykInstance load_instance(const std::string& path);

std::string format_observable(const Observable& obs);
Observable parse_observable(const std::string& text);
void save_observable(const Observable& obs, const std::string& path);
Observable load_observable(const std::string& path);

} // namespace syk
