#pragma once

#include <stdexcept>
#include <string>

namespace syk {

// Error taxonomy. Every throwing path in the library uses one of these codes
// so the CLI can map failures onto distinct process exit codes.
enum class errc {
    invalid_parity,           // odd index-set cardinality, odd n, ...
    index_out_of_range,       // site index outside [0, n)
    invalid_locality,         // q or |A_a| out of the supported range
    result_too_large,         // operator term count blew past its cap
    budget_exceeded,          // required K or enumeration size above budget
    beta_out_of_range,        // beta outside the certified window
    epsilon_out_of_range,     // epsilon outside its admissible window
    numerical_contamination,  // imaginary residue beyond tolerance on a real quantity
    too_large_for_dense,      // dense path refused (dim = 2^(n/2) too big)
    statistics_too_few,       // Monte Carlo sample count below the floor
    domain_error,             // precondition violation not covered above
    io_error,                 // file read/write/parse failure
    config_error,             // CLI / config-file validation failure
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace syk
