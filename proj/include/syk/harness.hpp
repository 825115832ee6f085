#pragma once

#include <string>
#include <vector>

#include "syk/errors.hpp"

namespace syk {

// Runs the sykgibbs command line in-process. `args` excludes the program
// name. Returns the process exit code; never throws on user input.
int run_cli(const std::vector<std::string>& args);

// Documented exit-code classes:
//   0 success (also --help, --dump-config)
//   2 configuration or validation error
//   3 work budget or result-size cap exceeded
//   4 numerical contamination
//   5 problem too large for the dense oracle
//   6 file I/O failure
//   1 unexpected internal error
int exit_code_for(errc code);

} // namespace syk
