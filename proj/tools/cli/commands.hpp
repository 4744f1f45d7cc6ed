#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ltfb::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_invalid_arguments = 2,
  exit_runtime_failure = 3,
};

/// Entry point shared by the `ltfb` binary and the tests. Writes result files
/// into the output directory; human-readable messages go to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "start:step:stop" or a comma-separated list into SER values.
std::vector<double> parse_grid(const std::string& text);

/// Fixed 9-significant-digit rendering used for every CSV cell.
std::string format_number(double value);

}  // namespace ltfb::cli
