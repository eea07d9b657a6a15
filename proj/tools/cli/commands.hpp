#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pushsum_cli {

/// Expands `--config FILE` (key = value lines, '#' comments) into flags for
/// every key not already given on the command line. args[0] is the program.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pushsum_cli
