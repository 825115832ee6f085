#pragma once

#include <string>
#include <vector>

#include "syk/majorana.hpp"

namespace syk {

// Normalized power traces mu_r = tr(H^r), r = 0..r_max (mu_0 = 1).
struct MomentSequence {
    std::vector<double> mu;       // index r
    double max_imag_residue = 0.0;

    int order() const { return static_cast<int>(mu.size()) - 1; }
};

// Computes H^k once per k <= ceil(r_max/2) and reads both mu_{2k} and
// mu_{2k+1} off pairwise traces, so the cost is r_max/2 sparse products.
// Traces of a Hermitian H are real; any imaginary residue beyond
// 1e-10 * max(1, max_r |mu_r|) aborts with numerical_contamination.
MomentSequence power_trace_sequence(const SparseOperator& h, int r_max,
                                    std::size_t term_cap = 0);

// "r,mu_r" lines, %.17g (or exact hex floats).
std::string format_moments_csv(const MomentSequence& m, bool hex_floats = false);

} // namespace syk
