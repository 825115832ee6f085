#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "syk/model.hpp"
#include "syk/moments.hpp"

namespace syk {

// Everything derived from (n, q, beta, epsilon, Gamma, L) by the explicit
// parameter formulas. All radii shrink like 1/sqrt(q*alpha).
struct EstimatorParams {
    int n = 0;
    int q = 0;
    int locality = 0;     // L, 0 when the observable is a single-body default
    double gamma = 0.0;   // column weight Gamma of the observable
    double beta = 0.0;
    double epsilon = 0.0;
    int k_max = 0;

    double C = 0.0;               // 2^{q/2-1} e^{-1/4} (sqrt(1+4/e) - 1)
    double delta = 0.0;           // fixed at 1/19
    int alpha = 0;                // max(q, L)
    double rho = 0.0;             // high-probability zero-free radius
    double R = 0.0;               // interpolation radius (1 - delta/2) rho
    double beta_ceiling = 0.0;    // (1 - delta) rho
    double epsilon_ceiling = 0.0; // 2^{3-q/2} beta n^2 Gamma / sqrt(q alpha)
    double h = 0.0;               // finite-difference step eps/(8 beta n^2 Gamma^2)
    double norm_term = 0.0;       // sqrt(1.01 ln2 / (q 2^q))
    double B = 0.0;               // log-derivative bound on the zero-free disk
    int K = 0;                    // Taylor truncation order
    double truncation_bound = 0.0; // <= eps/2 by construction
    double fd_bound = 0.0;         // finite-difference bias, = eps/16
};

// Validates the requested point and solves for (h, K) and the error split.
// Throws beta_out_of_range / epsilon_out_of_range when the request is
// outside the guaranteed window and budget_exceeded when K would pass k_max.
EstimatorParams select_parameters(int n, int q, double beta, double epsilon, double gamma,
                                  int locality, int k_max = 24);

// kappa[r] for r = 1..order (kappa[0] stays 0), computed by the recursion
//   kappa_r = mu_r - sum_{i<r} C(r-1, i-1) kappa_i mu_{r-i}
// in extended precision with exact Pascal binomials.
struct CumulantSequence {
    std::vector<double> kappa;

    int order() const { return static_cast<int>(kappa.size()) - 1; }
};

CumulantSequence moments_to_cumulants(const MomentSequence& m);

// sum_{m=1}^{order} (-1)^m kappa_m / m! * z^m — the Taylor expansion of
// log Z(z) around 0 when the kappas are the power-trace cumulants.
std::complex<double> log_partition_taylor(const CumulantSequence& c, std::complex<double> z,
                                          int order = -1);

struct EstimateReport {
    EstimatorParams params;
    MomentSequence moments_perturbed; // H + h O
    MomentSequence moments_bare;      // H
    CumulantSequence kappa_perturbed;
    CumulantSequence kappa_bare;
    double estimate = 0.0;
};

// The full pipeline: parameters, two moment sequences of length K, cumulant
// transforms, and the finite-difference of truncated log-partition series.
EstimateReport estimate_expectation(const SykInstance& inst, const Observable& obs, double beta,
                                    double epsilon, int k_max = 24, std::size_t term_cap = 0);

// Interval of centered second differences of lambda -> log Z_lambda(beta)
// over a uniform lambda grid, scaled by 1/dlambda^2, plus the a-priori
// bound beta^2 ||O||^2 they must respect (and the 0 lower bound).
struct DuhamelRange {
    double min = 0.0;
    double max = 0.0;
    double bound = 0.0;
};

DuhamelRange duhamel_second_difference(const SykInstance& inst, const Observable& obs, double beta,
                                       double lambda_max, int steps, int dense_cap = 20);

} // namespace syk
