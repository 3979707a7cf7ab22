#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcmsim {

enum ExitCode : int {
    kExitOk = 0,
    kExitUserError = 1,
    kExitLegality = 2,  // emitted command stream failed verification
};

/// Entry point behind the pcmsim binary. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcmsim
