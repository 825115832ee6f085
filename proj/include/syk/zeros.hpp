#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "syk/model.hpp"

namespace syk {

// The explicit radii and ceilings attached to a (q, L) pair. All of them
// are pinned by closed-form expressions in the constants C and delta.
struct RadiusSheet {
    int q = 0;
    int locality = 0; // L (0 means "no perturbation": alpha = q)
    int alpha = 0;    // max(q, L)
    double C = 0.0;
    double delta = 0.0;

    double whp_radius = 0.0;            // (19 C / 20) / sqrt(q alpha)
    double concentration_radius = 0.0;  // C / sqrt(q alpha)
    double main_radius = 0.0;           // (2^{q/2}/q)(19/40) e^{-1/4}(sqrt(1+4/e)-1)
    double annealed_beta_radius = 0.0;  // (sqrt(1+1/e)-1) sqrt(2^q / alpha)
    double estimator_beta_ceiling = 0.0; // (9 C / 10) / sqrt(q alpha)
    double lambda_gamma_annealed = 0.0;      // 2^{-q/2} / sqrt(alpha)
    double lambda_gamma_concentration = 0.0; // 2^{-q/2} / sqrt(q alpha)
};

RadiusSheet radius_sheet(int q, int locality = 0);

// Tree function T(x) = sum_{k>=1} k^{k-1} x^k / k! on [0, 1/e], by series
// with term recursion t_{k+1} = t_k * x * (1 + 1/k)^{k-1}; satisfies
// x = T e^{-T} away from the branch point at x = 1/e.
double tree_function(double x);

// Square grid in the complex-beta plane: resolution points per side from
// center - radius*(1+i) to center + radius*(1+i), row-major over the
// imaginary axis first.
struct GridSpec {
    std::complex<double> center{0.0, 0.0};
    double radius = 0.0;
    int resolution = 0;
};

struct ScanPoint {
    std::complex<double> beta{0.0, 0.0};
    std::complex<double> value{0.0, 0.0};
    bool certified = true;
};

struct ZeroScanReport {
    GridSpec grid;
    std::vector<ScanPoint> points;
    double min_abs = 0.0;
    std::complex<double> argmin_beta{0.0, 0.0};
    bool all_certified = true;
    bool lambda_warning = false;
};

// Z(beta) of one fixed operator over the grid, from its exact spectrum.
ZeroScanReport scan_operator_zeros(const SparseOperator& op, const GridSpec& grid,
                                   int dense_cap = 20);
ZeroScanReport scan_instance_zeros(const SykInstance& inst, const GridSpec& grid,
                                   int dense_cap = 20);

// Truncated Taylor series of the disorder-averaged partition function:
// coeff[m] multiplies beta^m and equals (-1)^m E tr(H^m) / m!.
struct AnnealedSeries {
    int n = 0;
    int q = 0;
    int order = 0;
    std::vector<double> moment; // E tr(H^m)
    std::vector<double> coeff;  // (-1)^m moment / m!
    double lambda_gamma = 0.0;
    double lambda_gamma_ceiling = 0.0; // 2^{-q/2} / sqrt(alpha)
    bool lambda_warning = false;       // lambda Gamma above the ceiling
};

AnnealedSeries annealed_partition_series(int n, int q, int order, const Observable* obs = nullptr,
                                         double lambda = 0.0, double budget = 5e7);

std::complex<double> annealed_series_value(const AnnealedSeries& s, std::complex<double> beta);

// Geometric tail estimate from the last two nonzero terms at this beta;
// +infinity when the term ratio has not dropped below 1.
double annealed_series_tail(const AnnealedSeries& s, std::complex<double> beta);

// Grid scan of the annealed series. A point is certified nonzero when
// |value| > 2 * tail.
ZeroScanReport scan_annealed_zeros(const AnnealedSeries& series, const GridSpec& grid);

} // namespace syk
