#include "syk/moments.hpp"

#include <algorithm>
#include <cmath>

#include "syk/errors.hpp"
#include "syk/io.hpp"

namespace syk {

MomentSequence power_trace_sequence(const SparseOperator& h, int r_max, std::size_t term_cap) {
    if (r_max < 0) fail(errc::domain_error, "moment order must be nonnegative");
    std::vector<cplx> raw(static_cast<std::size_t>(r_max) + 1, cplx{0.0, 0.0});
    raw[0] = {1.0, 0.0};
    if (r_max >= 1) raw[1] = normalized_trace(h);

    if (r_max >= 2) {
        SparseOperator power = h; // H^k
        for (int k = 1;; ++k) {
            if (2 * k <= r_max) raw[static_cast<std::size_t>(2 * k)] = trace_of_square(power);
            const bool need_next = (2 * k + 1 <= r_max) || (2 * (k + 1) <= r_max);
            if (!need_next) break;
            SparseOperator next = op_multiply(power, h, term_cap); // H^{k+1}
            if (2 * k + 1 <= r_max)
                raw[static_cast<std::size_t>(2 * k + 1)] = trace_of_product(power, next);
            power = std::move(next);
        }
    }

    MomentSequence out;
    out.mu.resize(raw.size());
    double scale = 1.0;
    for (std::size_t r = 0; r < raw.size(); ++r) {
        out.mu[r] = raw[r].real();
        scale = std::max(scale, std::abs(out.mu[r]));
        out.max_imag_residue = std::max(out.max_imag_residue, std::abs(raw[r].imag()));
    }
    if (out.max_imag_residue > 1e-10 * scale)
        fail(errc::numerical_contamination,
             "power traces have imaginary residue " + fmt_g17(out.max_imag_residue) +
                 " (scale " + fmt_g17(scale) + "); operator is not Hermitian enough");
    return out;
}

std::string format_moments_csv(const MomentSequence& m, bool hex_floats) {
    std::string out = "r,mu_r\n";
    for (std::size_t r = 0; r < m.mu.size(); ++r) {
        out += std::to_string(r);
        out += ",";
        out += hex_floats ? fmt_hex(m.mu[r]) : fmt_g17(m.mu[r]);
        out += "\n";
    }
    return out;
}

} // namespace syk
