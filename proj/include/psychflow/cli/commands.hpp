#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psychflow::cli {

/// Parses and executes one command line (without the program name).
/// Returns the process exit code: 0 success, 1 invalid usage or input,
/// 2 internal failure. Normal output goes to `out`, errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace psychflow::cli
