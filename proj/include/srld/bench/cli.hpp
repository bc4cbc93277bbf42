// Command-line entry point, exposed as a function so tests can drive it
// in-process.  Exit codes: 0 success, 1 config/runtime failure, 2 usage.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srld::bench {

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace srld::bench
