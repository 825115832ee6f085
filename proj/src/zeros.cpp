#include "syk/zeros.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "syk/dense.hpp"
#include "syk/errors.hpp"
#include "syk/wick.hpp"

namespace syk {

RadiusSheet radius_sheet(int q, int locality) {
    if (q < 2 || q % 2 != 0) fail(errc::invalid_parity, "q must be even and >= 2");
    if (locality < 0 || locality % 2 != 0)
        fail(errc::invalid_locality, "locality must be even and nonnegative");
    RadiusSheet s;
    s.q = q;
    s.locality = locality;
    s.alpha = std::max(q, locality);
    s.C = std::ldexp(1.0, q / 2 - 1) * std::exp(-0.25) * (std::sqrt(1.0 + 4.0 / M_E) - 1.0);
    s.delta = 1.0 / 19.0;
    const double root = std::sqrt(static_cast<double>(q) * s.alpha);
    s.whp_radius = (19.0 * s.C / 20.0) / root;
    s.concentration_radius = s.C / root;
    s.main_radius = (std::ldexp(1.0, q / 2) / q) * (19.0 / 40.0) * std::exp(-0.25) *
                    (std::sqrt(1.0 + 4.0 / M_E) - 1.0);
    s.annealed_beta_radius =
        (std::sqrt(1.0 + 1.0 / M_E) - 1.0) * std::sqrt(std::ldexp(1.0, q) / s.alpha);
    s.estimator_beta_ceiling = (9.0 * s.C / 10.0) / root;
    s.lambda_gamma_annealed = std::ldexp(1.0, -q / 2) / std::sqrt(static_cast<double>(s.alpha));
    s.lambda_gamma_concentration = std::ldexp(1.0, -q / 2) / root;
    return s;
}

double tree_function(double x) {
    if (!(x >= 0.0) || x > (1.0 / M_E) * (1.0 + 1e-12))
        fail(errc::domain_error, "tree function is evaluated on [0, 1/e]");
    double term = x; // k = 1 term: x
    double total = 0.0;
    for (int k = 1; k <= 2000; ++k) {
        total += term;
        if (term < 1e-14) break;
        term *= x * std::pow(1.0 + 1.0 / k, k - 1);
    }
    return total;
}

namespace {

ZeroScanReport scan_grid(const GridSpec& grid,
                         const std::function<ScanPoint(std::complex<double>)>& eval) {
    if (grid.resolution < 1) fail(errc::domain_error, "grid resolution must be >= 1");
    if (grid.radius < 0.0) fail(errc::domain_error, "grid radius must be nonnegative");
    ZeroScanReport rep;
    rep.grid = grid;
    rep.points.reserve(static_cast<std::size_t>(grid.resolution) * grid.resolution);
    const double step = grid.resolution > 1 ? 2.0 * grid.radius / (grid.resolution - 1) : 0.0;
    const double lo = grid.resolution > 1 ? -grid.radius : 0.0;
    const double keep = grid.radius * (1.0 + 1e-12);
    bool first = true;
    for (int iy = 0; iy < grid.resolution; ++iy) {
        for (int ix = 0; ix < grid.resolution; ++ix) {
            const std::complex<double> offset(lo + ix * step, lo + iy * step);
            // Cartesian lattice over the bounding square; corners beyond the
            // disk radius are skipped.
            if (std::abs(offset) > keep) continue;
            const std::complex<double> beta = grid.center + offset;
            ScanPoint pt = eval(beta);
            const double mag = std::abs(pt.value);
            if (first || mag < rep.min_abs) {
                rep.min_abs = mag;
                rep.argmin_beta = pt.beta;
                first = false;
            }
            rep.all_certified = rep.all_certified && pt.certified;
            rep.points.push_back(pt);
        }
    }
    if (rep.points.empty()) { // degenerate lattice: fall back to the center
        ScanPoint pt = eval(grid.center);
        rep.min_abs = std::abs(pt.value);
        rep.argmin_beta = pt.beta;
        rep.all_certified = pt.certified;
        rep.points.push_back(pt);
    }
    return rep;
}

} // namespace

ZeroScanReport scan_operator_zeros(const SparseOperator& op, const GridSpec& grid, int dense_cap) {
    const Eigen::VectorXd evals = blocked_eigenvalues(op, dense_cap);
    const double dim = static_cast<double>(evals.size());
    return scan_grid(grid, [&](std::complex<double> beta) {
        std::complex<double> z{0.0, 0.0};
        for (Eigen::Index i = 0; i < evals.size(); ++i) z += std::exp(-beta * evals[i]);
        return ScanPoint{beta, z / dim, true};
    });
}

ZeroScanReport scan_instance_zeros(const SykInstance& inst, const GridSpec& grid, int dense_cap) {
    return scan_operator_zeros(build_hamiltonian(inst), grid, dense_cap);
}

AnnealedSeries annealed_partition_series(int n, int q, int order, const Observable* obs,
                                         double lambda, double budget) {
    if (order < 0) fail(errc::domain_error, "series order must be nonnegative");
    AnnealedSeries s;
    s.n = n;
    s.q = q;
    s.order = order;
    s.moment.resize(static_cast<std::size_t>(order) + 1, 0.0);
    s.coeff.resize(static_cast<std::size_t>(order) + 1, 0.0);
    s.moment[0] = 1.0;
    s.coeff[0] = 1.0;
    long double factorial = 1.0L;
    for (int m = 1; m <= order; ++m) {
        factorial *= m;
        const double moment = annealed_trace_moment(n, q, m, obs, lambda, budget);
        s.moment[static_cast<std::size_t>(m)] = moment;
        s.coeff[static_cast<std::size_t>(m)] =
            static_cast<double>(((m % 2) ? -1.0L : 1.0L) * static_cast<long double>(moment) /
                                factorial);
    }
    if (obs && !obs->empty() && lambda != 0.0) {
        const RadiusSheet sheet = radius_sheet(q, obs->locality());
        s.lambda_gamma = std::abs(lambda) * obs->gamma();
        s.lambda_gamma_ceiling = sheet.lambda_gamma_annealed;
        s.lambda_warning = s.lambda_gamma > s.lambda_gamma_ceiling;
    }
    return s;
}

std::complex<double> annealed_series_value(const AnnealedSeries& s, std::complex<double> beta) {
    std::complex<double> pow{1.0, 0.0};
    std::complex<double> total{0.0, 0.0};
    for (std::size_t m = 0; m < s.coeff.size(); ++m) {
        total += s.coeff[m] * pow;
        pow *= beta;
    }
    return total;
}

double annealed_series_tail(const AnnealedSeries& s, std::complex<double> beta) {
    const double inf = std::numeric_limits<double>::infinity();
    const double mag = std::abs(beta);
    if (mag == 0.0) return 0.0; // only the constant term survives
    double last = -1.0, prev = -1.0; // |coeff_m beta^m| of the two highest nonzero terms
    for (std::size_t m = 0; m < s.coeff.size(); ++m) {
        if (s.coeff[m] == 0.0) continue;
        prev = last;
        last = std::abs(s.coeff[m]) * std::pow(mag, static_cast<double>(m));
    }
    if (prev <= 0.0 || last <= 0.0) return inf;
    const double ratio = last / prev;
    if (!(ratio < 1.0)) return inf;
    return last * ratio / (1.0 - ratio);
}

ZeroScanReport scan_annealed_zeros(const AnnealedSeries& series, const GridSpec& grid) {
    ZeroScanReport rep = scan_grid(grid, [&](std::complex<double> beta) {
        const std::complex<double> value = annealed_series_value(series, beta);
        const double tail = annealed_series_tail(series, beta);
        return ScanPoint{beta, value, std::abs(value) > 2.0 * tail};
    });
    rep.lambda_warning = series.lambda_warning;
    return rep;
}

} // namespace syk
