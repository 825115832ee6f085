#include "syk/wick.hpp"

#include <algorithm>
#include <cmath>

#include "syk/bits.hpp"
#include "syk/dense.hpp"
#include "syk/errors.hpp"
#include "syk/io.hpp"
#include "syk/moments.hpp"

namespace syk {

std::uint64_t pairing_count(int m) {
    if (m < 0) fail(errc::domain_error, "negative point count");
    if (m % 2 != 0) return 0;
    if (m > 34) fail(errc::result_too_large, "double factorial overflows past 34 points");
    std::uint64_t out = 1;
    for (int k = m - 1; k > 1; k -= 2) out *= static_cast<std::uint64_t>(k);
    return out;
}

namespace {

void pairing_rec(std::vector<int>& free_points, std::vector<std::pair<int, int>>& current,
                 const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
    if (free_points.empty()) {
        visit(current);
        return;
    }
    if (free_points.size() == 1) return; // odd leftover: no perfect matching
    const int a = free_points[0];
    for (std::size_t j = 1; j < free_points.size(); ++j) {
        const int b = free_points[j];
        std::vector<int> rest;
        rest.reserve(free_points.size() - 2);
        for (std::size_t t = 1; t < free_points.size(); ++t)
            if (t != j) rest.push_back(free_points[t]);
        current.emplace_back(a, b);
        pairing_rec(rest, current, visit);
        current.pop_back();
    }
}

} // namespace

void for_each_pairing(const std::vector<int>& points,
                      const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
    std::vector<int> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, int>> current;
    current.reserve(sorted.size() / 2);
    pairing_rec(sorted, current, visit);
}

std::vector<std::vector<std::pair<int, int>>> enumerate_pairings(const std::vector<int>& points) {
    if (points.size() % 2 != 0)
        fail(errc::invalid_parity, "perfect matchings need an even number of points");
    if (points.size() > 12)
        fail(errc::budget_exceeded, "refusing to materialize matchings of more than 12 points");
    std::vector<std::vector<std::pair<int, int>>> out;
    for_each_pairing(points, [&](const std::vector<std::pair<int, int>>& p) { out.push_back(p); });
    return out;
}

double enumeration_size(int n, int q, int m, std::size_t n_obs_terms) {
    if (m < 0) fail(errc::domain_error, "negative moment order");
    const double subsets = static_cast<double>(binomial_u64(n, q));
    const double M = static_cast<double>(n_obs_terms);
    double total = 0.0;
    for (int k = (m % 2 == 0) ? 0 : 1; k <= m; k += 2) {
        if (M == 0.0 && k != m) continue;
        double term = static_cast<double>(binomial_u64(m, k));
        for (int d = k - 1; d > 1; d -= 2) term *= d; // (k-1)!!
        term *= std::pow(subsets, k / 2);
        term *= std::pow(M, m - k);
        total += term;
    }
    return total;
}

namespace {

struct Accumulator {
    cplx total{0.0, 0.0};
    double max_abs = 0.0;

    void add(cplx v) {
        total += v;
        max_abs = std::max(max_abs, std::abs(v));
    }

    double real_checked(const char* what) const {
        const double scale = std::max(1.0, std::max(max_abs, std::abs(total.real())));
        if (std::abs(total.imag()) > 1e-10 * scale)
            fail(errc::numerical_contamination,
                 std::string(what) + ": imaginary residue " + fmt_g17(total.imag()) +
                     " survives the conjugate pairing");
        return total.real();
    }
};

// tr_0(ordered product) * tr_1(ordered product) for fully resolved masks.
cplx replica_trace_product(const std::vector<int>& replica,
                           const std::vector<std::uint64_t>& masks) {
    MajoranaTerm acc[2] = {{0, {1.0, 0.0}}, {0, {1.0, 0.0}}};
    for (std::size_t p = 0; p < masks.size(); ++p) {
        const MajoranaTerm t{masks[p], canonical_phase(popcount64(masks[p]))};
        MajoranaTerm& a = acc[replica[p]];
        a = term_product(a, t);
    }
    const cplx t0 = acc[0].mask == 0 ? acc[0].coeff : cplx{0.0, 0.0};
    const cplx t1 = acc[1].mask == 0 ? acc[1].coeff : cplx{0.0, 0.0};
    return t0 * t1;
}

// Sums every Wick configuration for the given position -> replica labels.
void enumerate_configurations(int n, int q, const std::vector<int>& replica,
                              const Observable* obs, double lambda, PairingScope scope,
                              double budget, Accumulator& acc) {
    const int m = static_cast<int>(replica.size());
    if (m > 16) fail(errc::budget_exceeded, "exact enumeration is limited to degree 16");
    for (int r : replica)
        if (r != 0 && r != 1) fail(errc::domain_error, "replica labels must be 0 or 1");
    const bool has_obs = obs != nullptr && !obs->empty() && lambda != 0.0;
    if (has_obs && obs->modes() != n)
        fail(errc::domain_error, "observable mode count does not match the model");
    const std::size_t M = has_obs ? obs->size() : 0;

    const double work = enumeration_size(n, q, m, M);
    if (work > budget)
        fail(errc::budget_exceeded, "enumeration needs about " + fmt_g17(work) +
                                        " configurations, budget is " + fmt_g17(budget));

    const auto qmasks = qsubset_masks(n, q);
    const double sigma2 = coupling_variance(n, q);
    if (m == 0) {
        acc.add({1.0, 0.0}); // tr(identity) * tr(identity)
        return;
    }

    std::vector<std::uint64_t> masks(static_cast<std::size_t>(m), 0);
    for (std::uint32_t dmask = 0; dmask < (1u << m); ++dmask) {
        const int k = popcount64(dmask);
        if (k % 2 != 0) continue;            // odd Gaussian moments vanish
        if (!has_obs && k != m) continue;    // no observable vertices available
        std::vector<int> dpos, opos;
        for (int p = 0; p < m; ++p)
            ((dmask >> p) & 1u ? dpos : opos).push_back(p);
        const int np = k / 2;
        const int nobs = m - k;
        const double pair_weight = std::pow(sigma2, np);

        for_each_pairing(dpos, [&](const std::vector<std::pair<int, int>>& pairs) {
            if (scope == PairingScope::within_replica)
                for (const auto& [a, b] : pairs)
                    if (replica[static_cast<std::size_t>(a)] !=
                        replica[static_cast<std::size_t>(b)])
                        return;
            std::vector<std::size_t> pc(static_cast<std::size_t>(np), 0);
            std::vector<std::size_t> oc(static_cast<std::size_t>(nobs), 0);
            while (true) {
                double weight = pair_weight;
                for (int i = 0; i < np; ++i) {
                    const std::uint64_t mask = qmasks[pc[static_cast<std::size_t>(i)]];
                    masks[static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].first)] = mask;
                    masks[static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].second)] = mask;
                }
                for (int j = 0; j < nobs; ++j) {
                    const std::size_t choice = oc[static_cast<std::size_t>(j)];
                    masks[static_cast<std::size_t>(opos[static_cast<std::size_t>(j)])] =
                        obs->masks()[choice];
                    weight *= lambda * obs->coeffs()[choice];
                }
                acc.add(weight * replica_trace_product(replica, masks));

                // mixed-radix advance: subset choices first, then observable
                int level = 0;
                for (; level < np; ++level) {
                    if (++pc[static_cast<std::size_t>(level)] < qmasks.size()) break;
                    pc[static_cast<std::size_t>(level)] = 0;
                }
                if (level < np) continue;
                for (level = 0; level < nobs; ++level) {
                    if (++oc[static_cast<std::size_t>(level)] < M) break;
                    oc[static_cast<std::size_t>(level)] = 0;
                }
                if (level == nobs) break;
            }
        });
    }
}

} // namespace

double annealed_trace_moment(int n, int q, int m, const Observable* obs, double lambda,
                             double budget) {
    Accumulator acc;
    enumerate_configurations(n, q, std::vector<int>(static_cast<std::size_t>(m), 0), obs, lambda,
                             PairingScope::all, budget, acc);
    return acc.real_checked("annealed moment");
}

double two_replica_moment(int n, int q, int l1, int l2, const Observable* obs, double lambda,
                          PairingScope scope, double budget) {
    if (l1 < 0 || l2 < 0) fail(errc::domain_error, "negative trace power");
    if (l1 > l2) std::swap(l1, l2); // canonical order: identical sums bitwise
    std::vector<int> replica(static_cast<std::size_t>(l1 + l2), 1);
    std::fill(replica.begin(), replica.begin() + l1, 0);
    return two_replica_moment_assigned(n, q, replica, obs, lambda, scope, budget);
}

double two_replica_moment_assigned(int n, int q, const std::vector<int>& replica,
                                   const Observable* obs, double lambda, PairingScope scope,
                                   double budget) {
    Accumulator acc;
    enumerate_configurations(n, q, replica, obs, lambda, scope, budget, acc);
    return acc.real_checked("two-replica moment");
}

FactorizationCheck connected_factorization_check(int n, const WickConfiguration& cfg) {
    const std::size_t m = cfg.masks.size();
    if (cfg.replica.size() != m || static_cast<std::size_t>(cfg.m) != m)
        fail(errc::domain_error, "configuration sizes are inconsistent");
    const std::uint64_t limit = (n >= 64) ? ~0ull : (1ull << n);
    for (std::size_t p = 0; p < m; ++p) {
        if (cfg.replica[p] != 0 && cfg.replica[p] != 1)
            fail(errc::domain_error, "replica labels must be 0 or 1");
        if (cfg.masks[p] >= limit)
            fail(errc::index_out_of_range, "configuration mask outside mode range");
        if (popcount64(cfg.masks[p]) % 2 != 0)
            fail(errc::invalid_parity, "configuration masks must have even cardinality");
    }

    FactorizationCheck out;
    out.direct = replica_trace_product(cfg.replica, cfg.masks);

    // Union-find over positions.
    std::vector<int> parent(m);
    for (std::size_t i = 0; i < m; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (cfg.replica[i] == cfg.replica[j] && (cfg.masks[i] & cfg.masks[j]) != 0)
                unite(static_cast<int>(i), static_cast<int>(j));
    for (const auto& [a, b] : cfg.pairs) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= m || static_cast<std::size_t>(b) >= m)
            fail(errc::index_out_of_range, "matched pair references a missing position");
        unite(a, b);
    }

    out.factored = {1.0, 0.0};
    std::vector<int> roots;
    for (std::size_t r = 0; r < m; ++r)
        if (find(static_cast<int>(r)) == static_cast<int>(r)) roots.push_back(static_cast<int>(r));
    out.components = static_cast<int>(roots.size());
    for (int root : roots) {
        std::vector<int> comp_replica;
        std::vector<std::uint64_t> comp_masks;
        for (std::size_t p = 0; p < m; ++p) {
            if (find(static_cast<int>(p)) != root) continue;
            comp_replica.push_back(cfg.replica[p]);
            comp_masks.push_back(cfg.masks[p]);
        }
        out.factored *= replica_trace_product(comp_replica, comp_masks);
    }
    return out;
}

namespace {

McStats stats_of(const std::vector<double>& xs) {
    const int nsamp = static_cast<int>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= nsamp;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    McStats out;
    out.mean = mean;
    out.std_error = std::sqrt(ss / (static_cast<double>(nsamp) * (nsamp - 1)));
    out.samples = nsamp;
    return out;
}

} // namespace

McStats mc_trace_moment(int n, int q, int m, const Observable* obs, double lambda, int samples,
                        std::uint64_t seed, std::size_t term_cap) {
    if (samples < 2) fail(errc::statistics_too_few, "need at least 2 samples");
    if (m < 0) fail(errc::domain_error, "negative moment order");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const SykInstance inst = sample_instance(n, q, seed + static_cast<std::uint64_t>(i));
        const SparseOperator h = build_hamiltonian(inst, obs, lambda);
        xs.push_back(power_trace_sequence(h, m, term_cap).mu[static_cast<std::size_t>(m)]);
    }
    return stats_of(xs);
}

McStats mc_two_replica(int n, int q, int l1, int l2, const Observable* obs, double lambda,
                       int samples, std::uint64_t seed, std::size_t term_cap) {
    if (samples < 2) fail(errc::statistics_too_few, "need at least 2 samples");
    if (l1 < 0 || l2 < 0) fail(errc::domain_error, "negative trace power");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(samples));
    const int top = std::max(l1, l2);
    for (int i = 0; i < samples; ++i) {
        const SykInstance inst = sample_instance(n, q, seed + static_cast<std::uint64_t>(i));
        const SparseOperator h = build_hamiltonian(inst, obs, lambda);
        const MomentSequence mu = power_trace_sequence(h, top, term_cap);
        xs.push_back(mu.mu[static_cast<std::size_t>(l1)] * mu.mu[static_cast<std::size_t>(l2)]);
    }
    return stats_of(xs);
}

ConcentrationPoint concentration_ratio(int n, int q, std::complex<double> beta, int samples,
                                       std::uint64_t seed, int dense_cap) {
    if (samples < 100)
        fail(errc::statistics_too_few,
             "concentration ratio needs at least 100 samples for a stable jackknife");
    std::vector<cplx> zs;
    zs.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const SykInstance inst = sample_instance(n, q, seed + static_cast<std::uint64_t>(i));
        const SparseOperator h = build_hamiltonian(inst);
        const Eigen::VectorXd evals = blocked_eigenvalues(h, dense_cap);
        cplx z{0.0, 0.0};
        for (Eigen::Index e = 0; e < evals.size(); ++e) z += std::exp(-beta * evals[e]);
        zs.push_back(z / static_cast<double>(evals.size()));
    }

    auto ratio_of = [](const std::vector<cplx>& v, int skip) {
        cplx mean{0.0, 0.0};
        int count = 0;
        for (int i = 0; i < static_cast<int>(v.size()); ++i) {
            if (i == skip) continue;
            mean += v[static_cast<std::size_t>(i)];
            ++count;
        }
        mean /= static_cast<double>(count);
        double var = 0.0;
        for (int i = 0; i < static_cast<int>(v.size()); ++i) {
            if (i == skip) continue;
            var += std::norm(v[static_cast<std::size_t>(i)] - mean);
        }
        var /= (count - 1);
        return std::pair<double, cplx>{var / std::norm(mean), mean};
    };

    ConcentrationPoint out;
    out.beta = beta;
    out.samples = samples;
    const auto [ratio, mean] = ratio_of(zs, -1);
    out.ratio = ratio;
    out.mean_z = mean;
    double var = 0.0;
    for (const cplx& z : zs) var += std::norm(z - mean);
    out.variance = var / (samples - 1);

    double jack_mean = 0.0;
    std::vector<double> jack(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        jack[static_cast<std::size_t>(i)] = ratio_of(zs, i).first;
        jack_mean += jack[static_cast<std::size_t>(i)];
    }
    jack_mean /= samples;
    double ss = 0.0;
    for (double r : jack) ss += (r - jack_mean) * (r - jack_mean);
    out.ratio_std_error = std::sqrt(ss * (samples - 1) / samples);
    return out;
}

} // namespace syk
