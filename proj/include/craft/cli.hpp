#pragma once

#include <string>
#include <vector>

namespace craft {

/// Entry point behind the `craft` binary; also callable in-process by tests.
/// Returns the process exit code: 0 iff the run completed.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace craft
