#include "syk/harness.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "syk/bits.hpp"
#include "syk/dense.hpp"
#include "syk/estimator.hpp"
#include "syk/io.hpp"
#include "syk/model.hpp"
#include "syk/moments.hpp"
#include "syk/wick.hpp"
#include "syk/zeros.hpp"

namespace syk {

int exit_code_for(errc code) {
    switch (code) {
        case errc::budget_exceeded:
        case errc::result_too_large:
            return 3;
        case errc::numerical_contamination:
            return 4;
        case errc::too_large_for_dense:
            return 5;
        case errc::io_error:
            return 6;
        default:
            return 2; // validation / configuration
    }
}

namespace {

struct CommonOpts {
    std::string out;
    bool hex_floats = false;
    int threads = 1;
};

struct ModelOpts {
    int n = 0;
    int q = 0;
    std::uint64_t seed = 0;
    bool zero_couplings = false;
    std::string instance_path;
    std::string obs_inline;
    std::string obs_file;
    std::string save_instance;
    double lambda = 0.0;
};

std::string resolve_out(const std::string& out) {
    if (out.empty() || out.front() == '/') return out;
    const char* dir = std::getenv("SYKGIBBS_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return out;
    std::string base(dir);
    if (base.back() != '/') base += '/';
    return base + out;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// Data file first, then the timestamp sidecar (the only place wall-clock
// values appear, so the data files stay byte-reproducible).
void emit(const std::string& resolved_out, const std::string& content, const std::string& command,
          double started_ms) {
    write_file(resolved_out, content);
    JsonWriter meta;
    meta.put("command", command);
    meta.put_num("started_unix_ms", started_ms);
    const double finished = now_ms();
    meta.put_num("finished_unix_ms", finished);
    meta.put_num("wall_ms", finished - started_ms);
    write_file(resolved_out + ".meta.json", meta.render());
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "c*i1,i2;c*i3,i4" -> Observable
Observable parse_observable_spec(int n, const std::string& spec) {
    std::vector<std::pair<std::vector<int>, double>> terms;
    for (const auto& chunk : split_on(spec, ';')) {
        if (chunk.empty()) continue;
        const auto star = chunk.find('*');
        if (star == std::string::npos)
            fail(errc::config_error, "observable term '" + chunk + "' lacks 'coeff*indices'");
        std::vector<int> indices;
        for (const auto& tok : split_on(chunk.substr(star + 1), ','))
            indices.push_back(static_cast<int>(parse_int(tok)));
        terms.emplace_back(std::move(indices), parse_double(chunk.substr(0, star)));
    }
    if (terms.empty()) fail(errc::config_error, "observable spec is empty");
    return Observable::from_indices(n, terms);
}

SykInstance resolve_instance(ModelOpts& mo) {
    SykInstance inst;
    if (!mo.instance_path.empty()) {
        inst = load_instance(mo.instance_path);
        mo.n = inst.n;
        mo.q = inst.q;
        mo.seed = inst.seed;
    } else if (mo.zero_couplings) {
        inst = zero_instance(mo.n, mo.q);
    } else {
        inst = sample_instance(mo.n, mo.q, mo.seed);
    }
    if (!mo.save_instance.empty()) save_instance(inst, resolve_out(mo.save_instance));
    return inst;
}

std::optional<Observable> resolve_observable(int n, const ModelOpts& mo) {
    if (!mo.obs_inline.empty() && !mo.obs_file.empty())
        fail(errc::config_error, "--obs and --obs-file are mutually exclusive");
    if (!mo.obs_inline.empty()) return parse_observable_spec(n, mo.obs_inline);
    if (!mo.obs_file.empty()) {
        Observable obs = load_observable(mo.obs_file);
        if (obs.modes() != n)
            fail(errc::config_error, "observable file is for n=" + std::to_string(obs.modes()) +
                                         ", model has n=" + std::to_string(n));
        return obs;
    }
    return std::nullopt;
}

std::string fmt_val(double v, bool hex) { return hex ? fmt_hex(v) : fmt_g17(v); }

void add_common(CLI::App* sub, CommonOpts& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("--out", c.out, "Output data file; relative paths honor SYKGIBBS_OUT_DIR")
        ->capture_default_str();
    sub->add_flag("--hex-floats", c.hex_floats, "Write CSV floats as exact hex");
    sub->add_option("--threads", c.threads, "Cap on internal parallelism")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_model(CLI::App* sub, ModelOpts& m, bool allow_zero_couplings) {
    auto* n = sub->add_option("--n", m.n, "Majorana mode count (even, <= 62)");
    auto* q = sub->add_option("--q", m.q, "Interaction locality (even)");
    sub->add_option("--seed", m.seed, "Disorder seed")->capture_default_str();
    sub->add_option("--instance", m.instance_path, "Read the instance from a file")
        ->excludes(n)
        ->excludes(q);
    if (allow_zero_couplings)
        sub->add_flag("--zero-couplings", m.zero_couplings,
                      "Use an all-zero disorder realization (control runs)");
    sub->add_option("--save-instance", m.save_instance,
                    "Also write the realized instance to this file");
}

void add_observable(CLI::App* sub, ModelOpts& m) {
    sub->add_option("--obs", m.obs_inline, "Inline observable, e.g. '0.5*0,1,2,3;-1*4,5'");
    sub->add_option("--obs-file", m.obs_file, "Observable file");
    sub->add_option("--lambda", m.lambda, "Perturbation strength multiplying the observable")
        ->capture_default_str();
}

void put_model_header(JsonWriter& j, const SykInstance& inst) {
    j.put_int("n", inst.n);
    j.put_int("q", inst.q);
    j.put_uint("seed", inst.seed);
}

// ---------------------------------------------------------------- commands

struct EstimateOpts {
    ModelOpts model;
    CommonOpts common;
    double beta = 0.0;
    double epsilon = 0.0;
    int k_max = 24;
    std::size_t term_cap = 0;
    int dense_cap = 20;
    bool verify = false;
};

void cmd_estimate(EstimateOpts& o) {
    const double started = now_ms();
    SykInstance inst = resolve_instance(o.model);
    const auto obs = resolve_observable(inst.n, o.model);
    if (!obs) fail(errc::config_error, "estimate requires --obs or --obs-file");
    if (o.model.lambda != 0.0)
        fail(errc::config_error,
             "estimate does not take --lambda; the finite-difference step is chosen internally");

    const EstimateReport rep =
        estimate_expectation(inst, *obs, o.beta, o.epsilon, o.k_max, o.term_cap);

    JsonWriter j;
    put_model_header(j, inst);
    j.put_num("beta", o.beta);
    j.put_num("epsilon", o.epsilon);
    j.put_int("k_max", o.k_max);
    j.put_num("gamma", rep.params.gamma);
    j.put_int("locality", rep.params.locality);
    j.put_num("C", rep.params.C);
    j.put_num("delta", rep.params.delta);
    j.put_int("alpha", rep.params.alpha);
    j.put_num("rho", rep.params.rho);
    j.put_num("R", rep.params.R);
    j.put_num("beta_ceiling", rep.params.beta_ceiling);
    j.put_num("epsilon_ceiling", rep.params.epsilon_ceiling);
    j.put_num("h", rep.params.h);
    j.put_num("norm_term", rep.params.norm_term);
    j.put_num("B", rep.params.B);
    j.put_int("K", rep.params.K);
    j.put_num("truncation_bound", rep.params.truncation_bound);
    j.put_num("fd_bound", rep.params.fd_bound);
    j.put_num("estimate", rep.estimate);
    j.put_num_array("mu_perturbed", rep.moments_perturbed.mu);
    j.put_num_array("mu_bare", rep.moments_bare.mu);
    j.put_num_array("kappa_perturbed", rep.kappa_perturbed.kappa);
    j.put_num_array("kappa_bare", rep.kappa_bare.kappa);
    if (o.verify) {
        const Spectrum spec = eigendecompose(to_dense(build_hamiltonian(inst), o.dense_cap));
        const double exact = gibbs_expectation(spec, to_dense(obs->to_operator(), o.dense_cap),
                                               o.beta);
        const double err = std::abs(rep.estimate - exact);
        j.put_num("exact", exact);
        j.put_num("abs_error", err);
        j.put_bool("within_epsilon", err <= o.epsilon);
    }
    emit(resolve_out(o.common.out), j.render(), "estimate", started);
    std::printf("estimate %s (K=%d, h=%s)\n", fmt_g17(rep.estimate).c_str(), rep.params.K,
                fmt_g17(rep.params.h).c_str());
}

struct ExactOpts {
    ModelOpts model;
    CommonOpts common;
    double beta = 0.0;
    int dense_cap = 20;
};

void cmd_exact(ExactOpts& o) {
    const double started = now_ms();
    SykInstance inst = resolve_instance(o.model);
    const auto obs = resolve_observable(inst.n, o.model);
    const SparseOperator h = build_hamiltonian(inst, obs ? &*obs : nullptr, o.model.lambda);
    const Spectrum spec = eigendecompose(to_dense(h, o.dense_cap));
    const cplx z = partition_function(spec, {o.beta, 0.0});

    JsonWriter j;
    put_model_header(j, inst);
    j.put_num("lambda", o.model.lambda);
    j.put_num("beta", o.beta);
    j.put_int("dim", static_cast<std::int64_t>(spec.energies.size()));
    j.put_num("e_min", spec.energies.minCoeff());
    j.put_num("e_max", spec.energies.maxCoeff());
    j.put_num("spectral_norm",
              std::max(std::abs(spec.energies.minCoeff()), std::abs(spec.energies.maxCoeff())));
    j.put_num("log_z", log_partition(spec, o.beta));
    j.put_num("z", z.real());
    if (obs)
        j.put_num("obs_expectation",
                  gibbs_expectation(spec, to_dense(obs->to_operator(), o.dense_cap), o.beta));
    emit(resolve_out(o.common.out), j.render(), "exact", started);
    std::printf("log Z(%s) = %s\n", fmt_g17(o.beta).c_str(),
                fmt_g17(log_partition(spec, o.beta)).c_str());
}

struct MomentsOpts {
    ModelOpts model;
    CommonOpts common;
    int r_max = 12;
    std::size_t term_cap = 0;
    bool dense_verify = false;
    int dense_cap = 20;
};

void cmd_moments(MomentsOpts& o) {
    const double started = now_ms();
    SykInstance inst = resolve_instance(o.model);
    const auto obs = resolve_observable(inst.n, o.model);
    const SparseOperator h = build_hamiltonian(inst, obs ? &*obs : nullptr, o.model.lambda);
    const MomentSequence ms = power_trace_sequence(h, o.r_max, o.term_cap);

    std::string csv;
    if (!o.dense_verify) {
        csv = "r,mu_r\n";
        for (std::size_t r = 0; r < ms.mu.size(); ++r)
            csv += std::to_string(r) + "," + fmt_val(ms.mu[r], o.common.hex_floats) + "\n";
    } else {
        const Eigen::VectorXd evals = blocked_eigenvalues(h, o.dense_cap);
        csv = "r,mu_r,mu_dense,rel_dev\n";
        double worst = 0.0;
        for (std::size_t r = 0; r < ms.mu.size(); ++r) {
            long double acc = 0.0L;
            for (Eigen::Index i = 0; i < evals.size(); ++i)
                acc += std::pow(static_cast<long double>(evals[i]), static_cast<int>(r));
            const double dense = static_cast<double>(acc / evals.size());
            const double dev = std::abs(ms.mu[r] - dense) / std::max(1.0, std::abs(dense));
            worst = std::max(worst, dev);
            csv += std::to_string(r) + "," + fmt_val(ms.mu[r], o.common.hex_floats) + "," +
                   fmt_val(dense, o.common.hex_floats) + "," +
                   fmt_val(dev, o.common.hex_floats) + "\n";
        }
        std::printf("max relative deviation vs dense: %s\n", fmt_g17(worst).c_str());
    }
    emit(resolve_out(o.common.out), csv, "moments", started);
}

struct AnnealOpts {
    ModelOpts model;
    CommonOpts common;
    int order = 8;
    double budget = 5e7;
};

void cmd_anneal(AnnealOpts& o) {
    const double started = now_ms();
    std::optional<Observable> obs;
    if (o.model.n != 0) obs = resolve_observable(o.model.n, o.model);
    const AnnealedSeries s = annealed_partition_series(o.model.n, o.model.q, o.order,
                                                       obs ? &*obs : nullptr, o.model.lambda,
                                                       o.budget);
    if (s.lambda_warning)
        std::fprintf(stderr, "warning: lambda*Gamma = %s exceeds the annealed ceiling %s\n",
                     fmt_g17(s.lambda_gamma).c_str(), fmt_g17(s.lambda_gamma_ceiling).c_str());
    std::string csv = "m,moment,coeff\n";
    for (int m = 0; m <= o.order; ++m)
        csv += std::to_string(m) + "," +
               fmt_val(s.moment[static_cast<std::size_t>(m)], o.common.hex_floats) + "," +
               fmt_val(s.coeff[static_cast<std::size_t>(m)], o.common.hex_floats) + "\n";
    emit(resolve_out(o.common.out), csv, "anneal", started);
}

struct TwoReplicaOpts {
    ModelOpts model;
    CommonOpts common;
    int l1 = 2;
    int l2 = 2;
    std::string scope = "all";
    double budget = 5e7;
};

void cmd_two_replica(TwoReplicaOpts& o) {
    const double started = now_ms();
    PairingScope scope;
    if (o.scope == "all")
        scope = PairingScope::all;
    else if (o.scope == "within")
        scope = PairingScope::within_replica;
    else
        fail(errc::config_error, "--scope must be 'all' or 'within', got '" + o.scope + "'");
    std::optional<Observable> obs;
    if (o.model.n != 0) obs = resolve_observable(o.model.n, o.model);
    const double value = two_replica_moment(o.model.n, o.model.q, o.l1, o.l2,
                                            obs ? &*obs : nullptr, o.model.lambda, scope,
                                            o.budget);
    JsonWriter j;
    j.put_int("n", o.model.n);
    j.put_int("q", o.model.q);
    j.put_int("l1", o.l1);
    j.put_int("l2", o.l2);
    j.put("scope", o.scope);
    j.put_num("lambda", o.model.lambda);
    j.put_num("value", value);
    emit(resolve_out(o.common.out), j.render(), "two-replica", started);
    std::printf("E[tr(H^%d) tr(H^%d)] = %s\n", o.l1, o.l2, fmt_g17(value).c_str());
}

struct ConcentrationOpts {
    CommonOpts common;
    int n = 0;
    int q = 0;
    std::uint64_t seed = 0;
    double beta_re = 0.0;
    double beta_im = 0.0;
    int samples = 300;
    int dense_cap = 20;
};

void cmd_concentration(ConcentrationOpts& o) {
    const double started = now_ms();
    const ConcentrationPoint pt = concentration_ratio(o.n, o.q, {o.beta_re, o.beta_im}, o.samples,
                                                      o.seed, o.dense_cap);
    JsonWriter j;
    j.put_int("n", o.n);
    j.put_int("q", o.q);
    j.put_uint("seed", o.seed);
    j.put_num("beta_re", o.beta_re);
    j.put_num("beta_im", o.beta_im);
    j.put_int("samples", pt.samples);
    j.put_num("mean_z_re", pt.mean_z.real());
    j.put_num("mean_z_im", pt.mean_z.imag());
    j.put_num("variance", pt.variance);
    j.put_num("ratio", pt.ratio);
    j.put_num("ratio_std_error", pt.ratio_std_error);
    emit(resolve_out(o.common.out), j.render(), "concentration", started);
    std::printf("fluctuation ratio %s +- %s\n", fmt_g17(pt.ratio).c_str(),
                fmt_g17(pt.ratio_std_error).c_str());
}

struct ScanOpts {
    ModelOpts model;
    CommonOpts common;
    bool annealed = false;
    int order = 8;
    double budget = 5e7;
    double center_re = 0.0;
    double center_im = 0.0;
    double radius = 0.0;
    int resolution = 41;
    int dense_cap = 20;
    std::string summary_out;
};

void cmd_scan_zeros(ScanOpts& o) {
    const double started = now_ms();
    const GridSpec grid{{o.center_re, o.center_im}, o.radius, o.resolution};
    ZeroScanReport rep;
    if (o.annealed) {
        std::optional<Observable> obs;
        if (o.model.n != 0) obs = resolve_observable(o.model.n, o.model);
        const AnnealedSeries s = annealed_partition_series(o.model.n, o.model.q, o.order,
                                                           obs ? &*obs : nullptr, o.model.lambda,
                                                           o.budget);
        rep = scan_annealed_zeros(s, grid);
    } else {
        SykInstance inst = resolve_instance(o.model);
        const auto obs = resolve_observable(inst.n, o.model);
        if (obs && o.model.lambda != 0.0) {
            const RadiusSheet sheet = radius_sheet(inst.q, obs->locality());
            rep.lambda_warning =
                std::abs(o.model.lambda) * obs->gamma() > sheet.lambda_gamma_concentration;
        }
        const SparseOperator h = build_hamiltonian(inst, obs ? &*obs : nullptr, o.model.lambda);
        const bool warn = rep.lambda_warning;
        rep = scan_operator_zeros(h, grid, o.dense_cap);
        rep.lambda_warning = warn;
    }
    if (rep.lambda_warning)
        std::fprintf(stderr, "warning: lambda*Gamma exceeds the zero-free ceiling; "
                             "the scanned disk carries no guarantee\n");

    std::string csv = "re_beta,im_beta,re_z,im_z,abs_z,certified\n";
    for (const ScanPoint& pt : rep.points) {
        csv += fmt_val(pt.beta.real(), o.common.hex_floats) + "," +
               fmt_val(pt.beta.imag(), o.common.hex_floats) + "," +
               fmt_val(pt.value.real(), o.common.hex_floats) + "," +
               fmt_val(pt.value.imag(), o.common.hex_floats) + "," +
               fmt_val(std::abs(pt.value), o.common.hex_floats) + "," +
               (pt.certified ? "1" : "0") + "\n";
    }
    emit(resolve_out(o.common.out), csv, "scan-zeros", started);
    if (!o.summary_out.empty()) {
        JsonWriter j;
        j.put_num("min_abs", rep.min_abs);
        j.put_num("argmin_re", rep.argmin_beta.real());
        j.put_num("argmin_im", rep.argmin_beta.imag());
        j.put_bool("all_certified", rep.all_certified);
        j.put_bool("lambda_warning", rep.lambda_warning);
        write_file(resolve_out(o.summary_out), j.render());
    }
    std::printf("min |Z| = %s at beta = (%s, %s)\n", fmt_g17(rep.min_abs).c_str(),
                fmt_g17(rep.argmin_beta.real()).c_str(), fmt_g17(rep.argmin_beta.imag()).c_str());
}

struct FluctuationOpts {
    CommonOpts common;
    int n = 0;
    int q = 0;
    std::uint64_t seed = 0;
    double beta = 0.2;
    int pairs = 20;
    int dense_cap = 20;
};

void cmd_fluctuations(FluctuationOpts& o) {
    const double started = now_ms();
    if (o.pairs < 10) fail(errc::statistics_too_few, "need at least 10 instance pairs");
    const auto masks = qsubset_masks(o.n, o.q);

    auto thermal_state = [&](std::uint64_t seed) {
        const SykInstance inst = sample_instance(o.n, o.q, seed);
        const Spectrum spec = eigendecompose(to_dense(build_hamiltonian(inst), o.dense_cap));
        return gibbs_state(spec, o.beta);
    };

    std::string csv = "pair,seed_a,seed_b,max_deviation\n";
    std::vector<double> devs;
    devs.reserve(static_cast<std::size_t>(o.pairs));
    for (int p = 0; p < o.pairs; ++p) {
        const std::uint64_t sa = o.seed + 2 * static_cast<std::uint64_t>(p);
        const std::uint64_t sb = sa + 1;
        const Eigen::MatrixXcd rho_a = thermal_state(sa);
        const Eigen::MatrixXcd rho_b = thermal_state(sb);
        double dev = 0.0;
        for (std::uint64_t mask : masks)
            dev = std::max(dev, std::abs(pauli_expectation(rho_a, mask, o.n) -
                                         pauli_expectation(rho_b, mask, o.n)));
        devs.push_back(dev);
        csv += std::to_string(p) + "," + std::to_string(sa) + "," + std::to_string(sb) + "," +
               fmt_val(dev, o.common.hex_floats) + "\n";
    }
    emit(resolve_out(o.common.out), csv, "fluctuations", started);

    std::sort(devs.begin(), devs.end());
    const std::size_t mid = devs.size() / 2;
    const double median =
        devs.size() % 2 ? devs[mid] : 0.5 * (devs[mid - 1] + devs[mid]);
    std::printf("median max-deviation over %d pairs: %s\n", o.pairs, fmt_g17(median).c_str());
}

struct ConstantsOpts {
    CommonOpts common;
    int q = 4;
    int locality = 0;
};

void cmd_constants(ConstantsOpts& o) {
    const double started = now_ms();
    const RadiusSheet s = radius_sheet(o.q, o.locality);
    JsonWriter j;
    j.put_int("q", s.q);
    j.put_int("locality", s.locality);
    j.put_int("alpha", s.alpha);
    j.put_num("C", s.C);
    j.put_num("delta", s.delta);
    j.put_num("whp_radius", s.whp_radius);
    j.put_num("concentration_radius", s.concentration_radius);
    j.put_num("main_radius", s.main_radius);
    j.put_num("annealed_beta_radius", s.annealed_beta_radius);
    j.put_num("estimator_beta_ceiling", s.estimator_beta_ceiling);
    j.put_num("lambda_gamma_annealed", s.lambda_gamma_annealed);
    j.put_num("lambda_gamma_concentration", s.lambda_gamma_concentration);
    emit(resolve_out(o.common.out), j.render(), "constants", started);
}

struct BenchOpts {
    CommonOpts common;
    int n = 12;
    int q = 4;
    int r_max = 8;
};

// Wall times ARE the payload here, so the bench CSV is exempt from the
// byte-reproducibility rule that the other data files obey.
void cmd_bench(BenchOpts& o) {
    const double started = now_ms();
    const SykInstance inst = sample_instance(o.n, o.q, 0);
    const SparseOperator h = build_hamiltonian(inst);

    std::string csv = "kernel,n,q,param,wall_ms\n";
    auto timed = [&](const std::string& kernel, int param, const std::function<void()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        csv += kernel + "," + std::to_string(o.n) + "," + std::to_string(o.q) + "," +
               std::to_string(param) + "," +
               fmt_g17(std::chrono::duration<double, std::milli>(t1 - t0).count()) + "\n";
    };
    timed("power_trace_sequence", o.r_max, [&] { power_trace_sequence(h, o.r_max); });
    timed("blocked_eigenvalues", o.n, [&] { blocked_eigenvalues(h, std::max(o.n, 20)); });
    if (o.n <= 16)
        timed("eigendecompose", o.n, [&] { eigendecompose(to_dense(h, 16)); });
    emit(resolve_out(o.common.out), csv, "bench", started);
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"SYK thermal-expectation toolkit: interpolation estimator, dense oracle, "
                 "disorder averages, and complex-temperature zero scans"};
    app.name("sykgibbs");
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "key = value config file with one [section] per subcommand");
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config,
                 "Print the canonical form of the effective configuration and exit");

    EstimateOpts est;
    auto* s_est = app.add_subcommand("estimate", "Interpolation estimate of tr(O rho_beta)");
    add_model(s_est, est.model, false);
    add_observable(s_est, est.model);
    add_common(s_est, est.common, "estimate.json");
    s_est->add_option("--beta", est.beta, "Inverse temperature")->required();
    s_est->add_option("--epsilon", est.epsilon, "Additive accuracy target")->required();
    s_est->add_option("--kmax", est.k_max, "Cap on the truncation order K")
        ->capture_default_str();
    s_est->add_option("--term-cap", est.term_cap, "Cap on sparse product terms (0 = auto)");
    s_est->add_option("--dense-cap", est.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();
    s_est->add_flag("--verify", est.verify, "Cross-check against the dense oracle");

    ExactOpts exa;
    auto* s_exa = app.add_subcommand("exact", "Dense-oracle partition function and expectations");
    add_model(s_exa, exa.model, true);
    add_observable(s_exa, exa.model);
    add_common(s_exa, exa.common, "exact.json");
    s_exa->add_option("--beta", exa.beta, "Inverse temperature")->required();
    s_exa->add_option("--dense-cap", exa.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();

    MomentsOpts mom;
    auto* s_mom = app.add_subcommand("moments", "Normalized power traces tr(H^r)");
    add_model(s_mom, mom.model, true);
    add_observable(s_mom, mom.model);
    add_common(s_mom, mom.common, "moments.csv");
    s_mom->add_option("--rmax", mom.r_max, "Highest power")->capture_default_str();
    s_mom->add_option("--term-cap", mom.term_cap, "Cap on sparse product terms (0 = auto)");
    s_mom->add_flag("--dense-verify", mom.dense_verify,
                    "Add dense-oracle columns mu_dense and rel_dev");
    s_mom->add_option("--dense-cap", mom.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();

    AnnealOpts ann;
    auto* s_ann = app.add_subcommand("anneal", "Exact disorder-averaged moments E tr(H^m)");
    s_ann->add_option("--n", ann.model.n, "Majorana mode count")->required();
    s_ann->add_option("--q", ann.model.q, "Interaction locality")->required();
    add_observable(s_ann, ann.model);
    add_common(s_ann, ann.common, "anneal.csv");
    s_ann->add_option("--order", ann.order, "Series order")->capture_default_str();
    s_ann->add_option("--budget", ann.budget, "Enumeration budget")->capture_default_str();

    TwoReplicaOpts two;
    auto* s_two = app.add_subcommand("two-replica", "Exact E[tr(H^l1) tr(H^l2)]");
    s_two->add_option("--n", two.model.n, "Majorana mode count")->required();
    s_two->add_option("--q", two.model.q, "Interaction locality")->required();
    add_observable(s_two, two.model);
    add_common(s_two, two.common, "two_replica.json");
    s_two->add_option("--l1", two.l1, "First trace power")->required();
    s_two->add_option("--l2", two.l2, "Second trace power")->required();
    s_two->add_option("--scope", two.scope, "'all' or 'within' (replica-local pairings only)")
        ->capture_default_str();
    s_two->add_option("--budget", two.budget, "Enumeration budget")->capture_default_str();

    ConcentrationOpts con;
    auto* s_con = app.add_subcommand("concentration",
                                     "Sampled relative fluctuation of Z at complex beta");
    s_con->add_option("--n", con.n, "Majorana mode count")->required();
    s_con->add_option("--q", con.q, "Interaction locality")->required();
    s_con->add_option("--seed", con.seed, "Base seed (sample i uses seed + i)")
        ->capture_default_str();
    s_con->add_option("--beta-re", con.beta_re, "Re beta")->required();
    s_con->add_option("--beta-im", con.beta_im, "Im beta")->capture_default_str();
    s_con->add_option("--samples", con.samples, "Number of disorder samples")
        ->capture_default_str();
    s_con->add_option("--dense-cap", con.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();
    add_common(s_con, con.common, "concentration.json");

    ScanOpts scan;
    auto* s_scan = app.add_subcommand("scan-zeros",
                                      "Grid scan of Z(beta) over a complex-beta square");
    add_model(s_scan, scan.model, true);
    add_observable(s_scan, scan.model);
    add_common(s_scan, scan.common, "scan.csv");
    s_scan->add_flag("--annealed", scan.annealed, "Scan the disorder-averaged series instead");
    s_scan->add_option("--order", scan.order, "Series order for --annealed")
        ->capture_default_str();
    s_scan->add_option("--budget", scan.budget, "Enumeration budget for --annealed")
        ->capture_default_str();
    s_scan->add_option("--center-re", scan.center_re, "Grid center, real part")
        ->capture_default_str();
    s_scan->add_option("--center-im", scan.center_im, "Grid center, imaginary part")
        ->capture_default_str();
    s_scan->add_option("--radius", scan.radius, "Half-width of the square grid")->required();
    s_scan->add_option("--resolution", scan.resolution, "Points per side")
        ->capture_default_str();
    s_scan->add_option("--dense-cap", scan.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();
    s_scan->add_option("--summary-out", scan.summary_out, "Optional JSON scan summary");

    FluctuationOpts flu;
    auto* s_flu = app.add_subcommand("fluctuations",
                                     "Pairwise max deviation of local thermal expectations");
    s_flu->add_option("--n", flu.n, "Majorana mode count")->required();
    s_flu->add_option("--q", flu.q, "Interaction locality")->required();
    s_flu->add_option("--seed", flu.seed, "Base seed (pair p uses seed+2p, seed+2p+1)")
        ->capture_default_str();
    s_flu->add_option("--beta", flu.beta, "Inverse temperature")->capture_default_str();
    s_flu->add_option("--pairs", flu.pairs, "Number of instance pairs (>= 10)")
        ->capture_default_str();
    s_flu->add_option("--dense-cap", flu.dense_cap, "Largest n the dense oracle accepts")
        ->capture_default_str();
    add_common(s_flu, flu.common, "fluctuations.csv");

    ConstantsOpts cst;
    auto* s_cst = app.add_subcommand("constants", "Radii and ceilings for a (q, L) pair");
    s_cst->add_option("--q", cst.q, "Interaction locality")->required();
    s_cst->add_option("--locality", cst.locality, "Observable locality L (0 = none)")
        ->capture_default_str();
    add_common(s_cst, cst.common, "constants.json");

    BenchOpts ben;
    auto* s_ben = app.add_subcommand("bench", "Timings of the core kernels");
    s_ben->add_option("--n", ben.n, "Majorana mode count")->capture_default_str();
    s_ben->add_option("--q", ben.q, "Interaction locality")->capture_default_str();
    s_ben->add_option("--rmax", ben.r_max, "Moment order for the power-trace kernel")
        ->capture_default_str();
    add_common(s_ben, ben.common, "bench.csv");

    for (CLI::App* sub : app.get_subcommands({})) {
        sub->fallthrough();
        sub->configurable(true); // lets a [section] in --config address the subcommand
    }

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("sykgibbs");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (dump_config) {
            std::fputs(app.config_to_str(true, false).c_str(), stdout);
            return 0;
        }
        // Apply the parallelism cap before dispatch (kernels are currently
        // single-threaded; the cap is an upper bound, not a demand).
        const CommonOpts* common = nullptr;
        if (s_est->parsed()) common = &est.common;
        else if (s_exa->parsed()) common = &exa.common;
        else if (s_mom->parsed()) common = &mom.common;
        else if (s_ann->parsed()) common = &ann.common;
        else if (s_two->parsed()) common = &two.common;
        else if (s_con->parsed()) common = &con.common;
        else if (s_scan->parsed()) common = &scan.common;
        else if (s_flu->parsed()) common = &flu.common;
        else if (s_cst->parsed()) common = &cst.common;
        else if (s_ben->parsed()) common = &ben.common;
        if (common) Eigen::setNbThreads(common->threads);

        if (s_est->parsed()) cmd_estimate(est);
        else if (s_exa->parsed()) cmd_exact(exa);
        else if (s_mom->parsed()) cmd_moments(mom);
        else if (s_ann->parsed()) cmd_anneal(ann);
        else if (s_two->parsed()) cmd_two_replica(two);
        else if (s_con->parsed()) cmd_concentration(con);
        else if (s_scan->parsed()) cmd_scan_zeros(scan);
        else if (s_flu->parsed()) cmd_fluctuations(flu);
        else if (s_cst->parsed()) cmd_constants(cst);
        else if (s_ben->parsed()) cmd_bench(ben);
        else {
            std::fputs(app.help().c_str(), stdout);
            return 0;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help/error text itself
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

} // namespace syk
