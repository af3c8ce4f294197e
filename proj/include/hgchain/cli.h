#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgchain {

enum ExitCode
{
    exit_ok         = 0,
    exit_invalid    = 1, // usage error or validation failure
    exit_runtime    = 2,
};

/// Command line entry point; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}
