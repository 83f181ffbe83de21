#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rotorsim {

/// Command-line entry point, separated from main() for in-process testing.
/// args excludes the program name. Returns 0 on success, 1 on validation
/// errors, 2 on scenario faults.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rotorsim
