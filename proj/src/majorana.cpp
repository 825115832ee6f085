#include "syk/majorana.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace syk {

cplx canonical_phase(int k) {
    if (k < 0 || (k % 2) != 0)
        fail(errc::invalid_parity, "canonical string needs an even number of indices, got " +
                                       std::to_string(k));
    switch ((k / 2) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

MajoranaTerm make_string(const std::vector<int>& indices, int n_modes) {
    if (n_modes < 1 || n_modes > 62)
        fail(errc::index_out_of_range, "mode count must be in [1,62], got " + std::to_string(n_modes));
    if (indices.size() % 2 != 0)
        fail(errc::invalid_parity, "index set must have even cardinality, got " +
                                       std::to_string(indices.size()));
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (indices[i] <= indices[i - 1])
            fail(errc::domain_error, "indices must be strictly ascending");
    const std::uint64_t mask = mask_of_indices(indices, n_modes);
    return {mask, canonical_phase(static_cast<int>(indices.size()))};
}

double merge_sign(std::uint64_t a_mask, std::uint64_t b_mask) {
    // Move each generator of the right word left past the generators of the
    // left word that sit above it; each crossing flips the sign.
    int parity = 0;
    std::uint64_t b = b_mask;
    while (b) {
        const int bit = __builtin_ctzll(b);
        parity ^= popcount64(a_mask >> (bit + 1)) & 1;
        b &= b - 1;
    }
    return parity ? -1.0 : 1.0;
}

MajoranaTerm term_product(const MajoranaTerm& a, const MajoranaTerm& b) {
    const std::uint64_t mask = a.mask ^ b.mask;
    const int shared = popcount64(a.mask & b.mask);
    const double scale = std::ldexp(merge_sign(a.mask, b.mask), -shared);
    return {mask, a.coeff * b.coeff * scale};
}

MajoranaTerm term_adjoint(const MajoranaTerm& t) {
    const int k = popcount64(t.mask);
    const double sign = ((k * (k - 1) / 2) % 2) ? -1.0 : 1.0;
    return {t.mask, std::conj(t.coeff) * sign};
}

SparseOperator::SparseOperator(int n_modes) : n_(n_modes) {
    if (n_modes < 1 || n_modes > 62)
        fail(errc::index_out_of_range, "mode count must be in [1,62], got " + std::to_string(n_modes));
}

SparseOperator SparseOperator::identity(int n_modes) {
    SparseOperator op(n_modes);
    op.terms_.push_back({0, {1.0, 0.0}});
    return op;
}

SparseOperator SparseOperator::from_terms(int n_modes, const std::vector<MajoranaTerm>& terms) {
    SparseOperator op(n_modes);
    const std::uint64_t limit = (n_modes >= 64) ? ~0ull : (1ull << n_modes);
    std::vector<MajoranaTerm> work = terms;
    std::sort(work.begin(), work.end(),
              [](const MajoranaTerm& x, const MajoranaTerm& y) { return x.mask < y.mask; });
    for (const auto& t : work) {
        if (t.mask >= limit)
            fail(errc::index_out_of_range, "term mask uses modes beyond n=" + std::to_string(n_modes));
        if (popcount64(t.mask) % 2 != 0)
            fail(errc::invalid_parity, "term mask has odd cardinality; operators must be parity-even");
        if (!op.terms_.empty() && op.terms_.back().mask == t.mask)
            op.terms_.back().coeff += t.coeff;
        else
            op.terms_.push_back(t);
    }
    op.terms_.erase(std::remove_if(op.terms_.begin(), op.terms_.end(),
                                   [](const MajoranaTerm& t) { return t.coeff == cplx{0.0, 0.0}; }),
                    op.terms_.end());
    return op;
}

cplx SparseOperator::coeff(std::uint64_t mask) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const MajoranaTerm& t, std::uint64_t m) { return t.mask < m; });
    if (it != terms_.end() && it->mask == mask) return it->coeff;
    return {0.0, 0.0};
}

SparseOperator SparseOperator::adjoint() const {
    SparseOperator op(n_);
    op.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        MajoranaTerm adj = term_adjoint(t);
        if (adj.coeff != cplx{0.0, 0.0}) op.terms_.push_back(adj);
    }
    return op;
}

SparseOperator SparseOperator::scaled(cplx c) const {
    SparseOperator op(n_);
    if (c == cplx{0.0, 0.0}) return op;
    op.terms_.reserve(terms_.size());
    for (const auto& t : terms_) op.terms_.push_back({t.mask, t.coeff * c});
    return op;
}

SparseOperator SparseOperator::pruned(double threshold) const {
    SparseOperator op(n_);
    for (const auto& t : terms_)
        if (std::abs(t.coeff) >= threshold) op.terms_.push_back(t);
    return op;
}

bool SparseOperator::operator==(const SparseOperator& o) const {
    if (n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].mask != o.terms_[i].mask || terms_[i].coeff != o.terms_[i].coeff) return false;
    return true;
}

std::size_t default_term_cap(int n_modes) {
    const std::size_t hard = std::size_t{1} << 26;
    if (n_modes >= 26) return hard;
    return std::min(hard, std::size_t{1} << n_modes);
}

namespace {

// Flat-array accumulation workspace, reused across calls. Only entries in
// `touched` are ever dirty, so reset cost is proportional to the result size.
struct FlatWorkspace {
    std::vector<cplx> buf;
    std::vector<std::uint8_t> used;
    std::vector<std::uint64_t> touched;
};

constexpr int kFlatModeLimit = 20; // 2^20 complex doubles = 16 MiB

SparseOperator multiply_flat(const SparseOperator& a, const SparseOperator& b,
                             std::size_t cap) {
    static thread_local FlatWorkspace ws;
    const std::size_t dim = std::size_t{1} << a.modes();
    if (ws.buf.size() < dim) {
        ws.buf.assign(dim, cplx{0.0, 0.0});
        ws.used.assign(dim, 0);
    }
    ws.touched.clear();
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            const std::uint64_t mask = ta.mask ^ tb.mask;
            const int shared = popcount64(ta.mask & tb.mask);
            const double scale = std::ldexp(merge_sign(ta.mask, tb.mask), -shared);
            if (!ws.used[mask]) {
                ws.used[mask] = 1;
                ws.touched.push_back(mask);
            }
            ws.buf[mask] += ta.coeff * tb.coeff * scale;
        }
    }
    std::sort(ws.touched.begin(), ws.touched.end());
    std::vector<MajoranaTerm> out;
    out.reserve(ws.touched.size());
    for (std::uint64_t m : ws.touched) {
        if (ws.buf[m] != cplx{0.0, 0.0}) out.push_back({m, ws.buf[m]});
        ws.buf[m] = cplx{0.0, 0.0};
        ws.used[m] = 0;
    }
    ws.touched.clear();
    if (out.size() > cap)
        fail(errc::result_too_large, "product has " + std::to_string(out.size()) +
                                         " terms, cap is " + std::to_string(cap));
    return SparseOperator::from_terms(a.modes(), out);
}

SparseOperator multiply_hashed(const SparseOperator& a, const SparseOperator& b,
                               std::size_t cap) {
    std::unordered_map<std::uint64_t, cplx> acc;
    acc.reserve(std::min(cap, a.size() * b.size()) + 1);
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            const std::uint64_t mask = ta.mask ^ tb.mask;
            const int shared = popcount64(ta.mask & tb.mask);
            const double scale = std::ldexp(merge_sign(ta.mask, tb.mask), -shared);
            acc[mask] += ta.coeff * tb.coeff * scale;
            if (acc.size() > cap)
                fail(errc::result_too_large, "product exceeds term cap " + std::to_string(cap));
        }
    }
    std::vector<MajoranaTerm> out;
    out.reserve(acc.size());
    for (const auto& [mask, coeff] : acc)
        if (coeff != cplx{0.0, 0.0}) out.push_back({mask, coeff});
    return SparseOperator::from_terms(a.modes(), out);
}

} // namespace

SparseOperator op_multiply(const SparseOperator& a, const SparseOperator& b, std::size_t term_cap) {
    if (a.modes() != b.modes())
        fail(errc::domain_error, "operator mode counts differ: " + std::to_string(a.modes()) +
                                     " vs " + std::to_string(b.modes()));
    const std::size_t cap = term_cap ? term_cap : default_term_cap(a.modes());
    if (a.empty() || b.empty()) return SparseOperator(a.modes());
    if (a.modes() <= kFlatModeLimit) return multiply_flat(a, b, cap);
    return multiply_hashed(a, b, cap);
}

cplx normalized_trace(const SparseOperator& a) { return a.coeff(0); }

cplx trace_of_square(const SparseOperator& a) {
    cplx total{0.0, 0.0};
    for (const auto& t : a.terms()) {
        const int k = popcount64(t.mask);
        const double sign = ((k * (k - 1) / 2) % 2) ? -1.0 : 1.0;
        total += t.coeff * t.coeff * std::ldexp(sign, -k);
    }
    return total;
}

cplx trace_of_product(const SparseOperator& a, const SparseOperator& b) {
    if (a.modes() != b.modes())
        fail(errc::domain_error, "operator mode counts differ: " + std::to_string(a.modes()) +
                                     " vs " + std::to_string(b.modes()));
    cplx total{0.0, 0.0};
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    while (ia != a.terms().end() && ib != b.terms().end()) {
        if (ia->mask < ib->mask) {
            ++ia;
        } else if (ib->mask < ia->mask) {
            ++ib;
        } else {
            const int k = popcount64(ia->mask);
            const double sign = ((k * (k - 1) / 2) % 2) ? -1.0 : 1.0;
            total += ia->coeff * ib->coeff * std::ldexp(sign, -k);
            ++ia;
            ++ib;
        }
    }
    return total;
}

} // namespace syk
