#pragma once

#include <iosfwd>

namespace helmix::cli {

enum ExitCode : int {
    ok = 0,
    config_error = 2,
    domain_error = 3,
    assumption_violation = 4,
};

// Parses argv, runs one command and writes its artifact into the output directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace helmix::cli
