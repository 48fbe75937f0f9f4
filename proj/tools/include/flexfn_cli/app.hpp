#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexfn::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,  // validation or certificate failure
    kUsage = 2,        // bad flags or config
    kNumerical = 3,
};

/// Runs the flexfn command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexfn::cli
