#pragma once

#include <string>
#include <vector>

namespace sdass::cli {

/// Runs the command line given the arguments after the program name.
/// Exit codes: 0 success, 2 usage/parameter validation, 3 file parse
/// errors, 4 degenerate-geometry or registration failures, 1 unexpected.
/// Failures print one machine-readable "error: <kind>: <message>" line.
int run(const std::vector<std::string>& args);

} // namespace sdass::cli
