#pragma once

#include <string>
#include <vector>

namespace counterfair {

/// The `audit` command line. `args` excludes the program name.
///
/// Subcommands: plan validate, collect, score, analyze, report, run.
/// Exit codes: 0 success, 1 stage failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace counterfair
