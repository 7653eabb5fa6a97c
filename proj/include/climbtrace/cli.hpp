#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace climbtrace {

// Runs one CLI invocation. args excludes the program name. Data goes to
// out, diagnostics to err; the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace climbtrace
