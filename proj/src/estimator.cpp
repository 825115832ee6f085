#include "syk/estimator.hpp"

#include <cmath>

#include "syk/dense.hpp"
#include "syk/errors.hpp"
#include "syk/io.hpp"

namespace syk {

namespace {

// Pascal triangle in long double, row r up to order `rows`.
std::vector<std::vector<long double>> binomial_rows(int rows) {
    std::vector<std::vector<long double>> c(static_cast<std::size_t>(rows) + 1);
    for (int r = 0; r <= rows; ++r) {
        c[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(r) + 1, 1.0L);
        for (int k = 1; k < r; ++k)
            c[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] =
                c[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k - 1)] +
                c[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k)];
    }
    return c;
}

} // namespace

EstimatorParams select_parameters(int n, int q, double beta, double epsilon, double gamma,
                                  int locality, int k_max) {
    if (n < 2 || n > 62 || n % 2 != 0)
        fail(errc::invalid_parity, "n must be even and in [2,62]");
    if (q < 2 || q % 2 != 0 || q > n)
        fail(errc::invalid_parity, "q must be even, >= 2, and <= n");
    if (locality < 0 || locality % 2 != 0 || locality > n)
        fail(errc::invalid_locality, "observable locality must be even and <= n");
    if (!(gamma > 0.0))
        fail(errc::domain_error, "observable weight Gamma must be positive");
    if (k_max < 1)
        fail(errc::domain_error, "k_max must be at least 1");

    EstimatorParams p;
    p.n = n;
    p.q = q;
    p.locality = locality;
    p.gamma = gamma;
    p.beta = beta;
    p.epsilon = epsilon;
    p.k_max = k_max;

    p.C = std::ldexp(1.0, q / 2 - 1) * std::exp(-0.25) * (std::sqrt(1.0 + 4.0 / M_E) - 1.0);
    p.delta = 1.0 / 19.0;
    p.alpha = std::max(q, locality);
    const double root = std::sqrt(static_cast<double>(q) * p.alpha);
    p.rho = (19.0 * p.C / 20.0) / root;
    p.R = (1.0 - p.delta / 2.0) * p.rho;
    p.beta_ceiling = (9.0 * p.C / 10.0) / root;

    if (!(beta > 0.0) || beta > p.beta_ceiling)
        fail(errc::beta_out_of_range, "beta must lie in (0, " + fmt_g17(p.beta_ceiling) +
                                          "], got " + fmt_g17(beta));

    p.epsilon_ceiling = std::ldexp(1.0, 3 - q / 2) * beta * n * n * gamma / root;
    if (!(epsilon > 0.0) || epsilon > p.epsilon_ceiling)
        fail(errc::epsilon_out_of_range, "epsilon must lie in (0, " + fmt_g17(p.epsilon_ceiling) +
                                             "], got " + fmt_g17(epsilon));

    p.h = epsilon / (8.0 * beta * n * n * gamma * gamma);
    p.norm_term = std::sqrt(1.01 * std::log(2.0) / (q * std::ldexp(1.0, q)));
    const double shifted = (1.0 - p.delta / 4.0) * p.rho;
    p.B = (2.0 * p.R * shifted / (shifted - p.R)) * (p.h * gamma + p.norm_term);

    const double ratio = beta / p.R; // < 1 since beta <= (1 - delta) rho
    const double k_real =
        std::log(4.0 * p.B * n / (beta * p.h * epsilon * (1.0 - ratio))) / std::log(p.R / beta);
    p.K = std::max(1, static_cast<int>(std::ceil(k_real)));
    if (p.K > k_max)
        fail(errc::budget_exceeded, "truncation needs K=" + std::to_string(p.K) +
                                        " terms, cap k_max=" + std::to_string(k_max));

    p.truncation_bound =
        2.0 * p.B * n * std::pow(ratio, p.K + 1) / ((1.0 - ratio) * beta * p.h);
    p.fd_bound = p.h * beta * n * n * gamma * gamma / 2.0;
    return p;
}

CumulantSequence moments_to_cumulants(const MomentSequence& m) {
    const int order = m.order();
    if (order < 0 || m.mu.empty() || m.mu[0] != 1.0)
        fail(errc::domain_error, "moment sequence must start with mu_0 = 1");
    const auto binom = binomial_rows(order);
    std::vector<long double> mu(m.mu.begin(), m.mu.end());
    std::vector<long double> kappa(static_cast<std::size_t>(order) + 1, 0.0L);
    for (int r = 1; r <= order; ++r) {
        long double acc = mu[static_cast<std::size_t>(r)];
        for (int i = 1; i < r; ++i)
            acc -= binom[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i - 1)] *
                   kappa[static_cast<std::size_t>(i)] * mu[static_cast<std::size_t>(r - i)];
        kappa[static_cast<std::size_t>(r)] = acc;
    }
    CumulantSequence out;
    out.kappa.assign(kappa.begin(), kappa.end());
    return out;
}

std::complex<double> log_partition_taylor(const CumulantSequence& c, std::complex<double> z,
                                          int order) {
    const int top = (order < 0) ? c.order() : std::min(order, c.order());
    std::complex<long double> zl(z.real(), z.imag());
    std::complex<long double> zpow = 1.0L;
    std::complex<long double> acc = 0.0L;
    long double factorial = 1.0L;
    for (int m = 1; m <= top; ++m) {
        zpow *= zl;
        factorial *= m;
        const long double a_m =
            ((m % 2) ? -1.0L : 1.0L) * static_cast<long double>(c.kappa[static_cast<std::size_t>(m)]) /
            factorial;
        acc += a_m * zpow;
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

EstimateReport estimate_expectation(const SykInstance& inst, const Observable& obs, double beta,
                                    double epsilon, int k_max, std::size_t term_cap) {
    EstimateReport rep;
    rep.params = select_parameters(inst.n, inst.q, beta, epsilon, obs.gamma(), obs.locality(),
                                   k_max);
    const SparseOperator h_pert = build_hamiltonian(inst, &obs, rep.params.h);
    const SparseOperator h_bare = build_hamiltonian(inst);
    rep.moments_perturbed = power_trace_sequence(h_pert, rep.params.K, term_cap);
    rep.moments_bare = power_trace_sequence(h_bare, rep.params.K, term_cap);
    rep.kappa_perturbed = moments_to_cumulants(rep.moments_perturbed);
    rep.kappa_bare = moments_to_cumulants(rep.moments_bare);

    // -(1/(beta h)) [log Z_h(beta) - log Z_0(beta)] with both series
    // truncated at K; the two Taylor sums are combined term by term.
    long double acc = 0.0L;
    long double beta_pow = 1.0L;
    long double factorial = 1.0L;
    for (int m = 1; m <= rep.params.K; ++m) {
        beta_pow *= static_cast<long double>(beta);
        factorial *= m;
        const long double diff =
            static_cast<long double>(rep.kappa_perturbed.kappa[static_cast<std::size_t>(m)]) -
            static_cast<long double>(rep.kappa_bare.kappa[static_cast<std::size_t>(m)]);
        const long double a_diff = ((m % 2) ? -1.0L : 1.0L) * diff / factorial;
        acc += a_diff * beta_pow;
    }
    rep.estimate = static_cast<double>(-acc / (static_cast<long double>(beta) *
                                               static_cast<long double>(rep.params.h)));
    return rep;
}

DuhamelRange duhamel_second_difference(const SykInstance& inst, const Observable& obs, double beta,
                                       double lambda_max, int steps, int dense_cap) {
    if (steps < 2) fail(errc::domain_error, "need at least 2 grid steps");
    if (!(lambda_max > 0.0)) fail(errc::domain_error, "lambda_max must be positive");
    if (obs.modes() != inst.n) fail(errc::domain_error, "observable mode count mismatch");

    const double dl = lambda_max / steps;
    std::vector<double> logz(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const SparseOperator h = build_hamiltonian(inst, &obs, j * dl);
        const Spectrum spec = eigendecompose(to_dense(h, dense_cap));
        logz[static_cast<std::size_t>(j)] = log_partition(spec, beta);
    }

    DuhamelRange out;
    bool first = true;
    for (int j = 1; j < steps; ++j) {
        const double second = (logz[static_cast<std::size_t>(j + 1)] -
                               2.0 * logz[static_cast<std::size_t>(j)] +
                               logz[static_cast<std::size_t>(j - 1)]) /
                              (dl * dl);
        if (first || second < out.min) out.min = second;
        if (first || second > out.max) out.max = second;
        first = false;
    }
    const double norm = spectral_norm(obs.to_operator(), dense_cap);
    out.bound = beta * beta * norm * norm;
    return out;
}

} // namespace syk
