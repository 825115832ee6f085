#include "syk/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "syk/bits.hpp"
#include "syk/errors.hpp"
#include "syk/io.hpp"
#include "syk/rng.hpp"

namespace syk {

namespace {

void validate_model_shape(int n, int q) {
    if (n < 2 || n > 62 || n % 2 != 0)
        fail(errc::invalid_parity, "n must be even and in [2,62], got " + std::to_string(n));
    if (q < 2 || q % 2 != 0)
        fail(errc::invalid_parity, "q must be even and >= 2, got " + std::to_string(q));
    if (q > n)
        fail(errc::domain_error, "q=" + std::to_string(q) + " exceeds n=" + std::to_string(n));
    if (q == 2) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::fprintf(stderr,
                         "warning: q=2 is a free (quadratic) model; interpolation guarantees "
                         "assume q >= 4\n");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
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

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

// "i1,...,ik <value>" -> (mask, value)
std::pair<std::uint64_t, double> parse_term_line(const std::string& line, int n) {
    const auto sp = line.find(' ');
    if (sp == std::string::npos)
        fail(errc::config_error, "bad term line '" + line + "'");
    std::vector<int> indices;
    for (const auto& tok : split(line.substr(0, sp), ','))
        indices.push_back(static_cast<int>(parse_int(tok)));
    const std::uint64_t mask = mask_of_indices(indices, n);
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (indices[i] <= indices[i - 1])
            fail(errc::config_error, "indices must be strictly ascending in '" + line + "'");
    return {mask, parse_double(line.substr(sp + 1))};
}

std::string format_term_line(std::uint64_t mask, double value) {
    std::string out;
    bool first = true;
    for (int idx : indices_of_mask(mask)) {
        if (!first) out += ",";
        out += std::to_string(idx);
        first = false;
    }
    out += " ";
    out += fmt_hex(value);
    out += "\n";
    return out;
}

} // namespace

double coupling_variance(int n, int q) {
    validate_model_shape(n, q);
    double fact = 1.0;
    for (int i = 2; i < q; ++i) fact *= i;
    return fact / std::pow(static_cast<double>(n), q - 1);
}

SykInstance sample_instance(int n, int q, std::uint64_t seed) {
    validate_model_shape(n, q);
    SykInstance inst;
    inst.n = n;
    inst.q = q;
    inst.seed = seed;
    inst.masks = qsubset_masks(n, q);
    const double sigma = std::sqrt(coupling_variance(n, q));
    inst.couplings.resize(inst.masks.size());
    for (std::size_t i = 0; i < inst.masks.size(); ++i)
        inst.couplings[i] = sigma * normal_at(seed, i);
    return inst;
}

SykInstance zero_instance(int n, int q) {
    validate_model_shape(n, q);
    SykInstance inst;
    inst.n = n;
    inst.q = q;
    inst.seed = 0;
    inst.masks = qsubset_masks(n, q);
    inst.couplings.assign(inst.masks.size(), 0.0);
    return inst;
}

Observable::Observable(int n_modes, std::vector<std::uint64_t> masks, std::vector<double> coeffs)
    : n_(n_modes), masks_(std::move(masks)), coeffs_(std::move(coeffs)) {
    if (n_ < 2 || n_ > 62)
        fail(errc::index_out_of_range, "mode count must be in [2,62]");
    if (masks_.size() != coeffs_.size())
        fail(errc::domain_error, "observable mask/coefficient count mismatch");
    const std::uint64_t limit = 1ull << n_;
    std::vector<double> column_weight(static_cast<std::size_t>(n_), 0.0);
    for (std::size_t a = 0; a < masks_.size(); ++a) {
        if (masks_[a] == 0 || masks_[a] >= limit)
            fail(errc::index_out_of_range, "observable term outside mode range");
        const int k = popcount64(masks_[a]);
        if (k % 2 != 0)
            fail(errc::invalid_parity, "observable terms must have even cardinality");
        locality_ = std::max(locality_, k);
        for (int idx : indices_of_mask(masks_[a]))
            column_weight[static_cast<std::size_t>(idx)] += std::abs(coeffs_[a]);
    }
    for (double w : column_weight) gamma_ = std::max(gamma_, w);
}

Observable Observable::from_indices(
    int n_modes, const std::vector<std::pair<std::vector<int>, double>>& terms) {
    std::vector<std::uint64_t> masks;
    std::vector<double> coeffs;
    masks.reserve(terms.size());
    coeffs.reserve(terms.size());
    for (const auto& [indices, c] : terms) {
        masks.push_back(mask_of_indices(indices, n_modes));
        coeffs.push_back(c);
    }
    return Observable(n_modes, std::move(masks), std::move(coeffs));
}

SparseOperator Observable::to_operator() const {
    std::vector<MajoranaTerm> terms;
    terms.reserve(masks_.size());
    for (std::size_t a = 0; a < masks_.size(); ++a) {
        MajoranaTerm t{masks_[a], canonical_phase(popcount64(masks_[a]))};
        t.coeff *= coeffs_[a];
        terms.push_back(t);
    }
    return SparseOperator::from_terms(n_, terms);
}

SparseOperator build_hamiltonian(const SykInstance& inst, const Observable* obs, double lambda) {
    validate_model_shape(inst.n, inst.q);
    if (inst.masks.size() != inst.couplings.size())
        fail(errc::domain_error, "instance mask/coupling count mismatch");
    std::vector<MajoranaTerm> terms;
    terms.reserve(inst.masks.size() + (obs ? obs->size() : 0));
    const cplx phase = canonical_phase(inst.q);
    for (std::size_t i = 0; i < inst.masks.size(); ++i)
        terms.push_back({inst.masks[i], phase * inst.couplings[i]});
    if (obs && lambda != 0.0) {
        if (obs->modes() != inst.n)
            fail(errc::domain_error, "observable mode count does not match instance");
        for (std::size_t a = 0; a < obs->size(); ++a) {
            MajoranaTerm t{obs->masks()[a], canonical_phase(popcount64(obs->masks()[a]))};
            t.coeff *= lambda * obs->coeffs()[a];
            terms.push_back(t);
        }
    }
    return SparseOperator::from_terms(inst.n, terms);
}

std::string format_instance(const SykInstance& inst) {
    std::string out = std::to_string(inst.n) + " " + std::to_string(inst.q) + " " +
                      std::to_string(inst.seed) + "\n";
    for (std::size_t i = 0; i < inst.masks.size(); ++i)
        out += format_term_line(inst.masks[i], inst.couplings[i]);
    return out;
}

SykInstance parse_instance(const std::string& text) {
    const auto lines = nonempty_lines(text);
    if (lines.empty()) fail(errc::config_error, "empty instance file");
    const auto head = split(lines[0], ' ');
    if (head.size() != 3) fail(errc::config_error, "instance header must be 'n q seed'");
    SykInstance inst;
    inst.n = static_cast<int>(parse_int(head[0]));
    inst.q = static_cast<int>(parse_int(head[1]));
    inst.seed = static_cast<std::uint64_t>(parse_int(head[2]));
    validate_model_shape(inst.n, inst.q);
    inst.masks = qsubset_masks(inst.n, inst.q);
    if (lines.size() != inst.masks.size() + 1)
        fail(errc::config_error, "instance must list all " + std::to_string(inst.masks.size()) +
                                     " couplings in colex order");
    inst.couplings.resize(inst.masks.size());
    for (std::size_t i = 0; i < inst.masks.size(); ++i) {
        const auto [mask, value] = parse_term_line(lines[i + 1], inst.n);
        if (mask != inst.masks[i])
            fail(errc::config_error, "coupling line " + std::to_string(i + 1) +
                                         " is out of colex order");
        inst.couplings[i] = value;
    }
    return inst;
}

void save_instance(const SykInstance& inst, const std::string& path) {
    write_file(path, format_instance(inst));
}

SykInstance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string format_observable(const Observable& obs) {
    std::string out = std::to_string(obs.modes()) + " " + std::to_string(obs.size()) + "\n";
    for (std::size_t a = 0; a < obs.size(); ++a)
        out += format_term_line(obs.masks()[a], obs.coeffs()[a]);
    return out;
}

Observable parse_observable(const std::string& text) {
    const auto lines = nonempty_lines(text);
    if (lines.empty()) fail(errc::config_error, "empty observable file");
    const auto head = split(lines[0], ' ');
    if (head.size() != 2) fail(errc::config_error, "observable header must be 'n m'");
    const int n = static_cast<int>(parse_int(head[0]));
    const auto m = static_cast<std::size_t>(parse_int(head[1]));
    if (lines.size() != m + 1)
        fail(errc::config_error, "observable header promises " + std::to_string(m) + " terms, file has " +
                                     std::to_string(lines.size() - 1));
    std::vector<std::uint64_t> masks;
    std::vector<double> coeffs;
    masks.reserve(m);
    coeffs.reserve(m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto [mask, value] = parse_term_line(lines[a + 1], n);
        masks.push_back(mask);
        coeffs.push_back(value);
    }
    return Observable(n, std::move(masks), std::move(coeffs));
}

void save_observable(const Observable& obs, const std::string& path) {
    write_file(path, format_observable(obs));
}

Observable load_observable(const std::string& path) { return parse_observable(read_file(path)); }

} // namespace syk
