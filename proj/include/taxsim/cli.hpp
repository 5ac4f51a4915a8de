#pragma once

namespace taxsim {

// Command-line entry point. Returns the process exit code:
// 0 success, 1 configuration error (message names the offending key),
// 2 runtime error. Outputs are written atomically.
int run_cli(int argc, const char* const* argv);

}  // namespace taxsim
