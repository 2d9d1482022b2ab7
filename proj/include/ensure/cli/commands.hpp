#pragma once

#include <string>
#include <vector>

namespace ensure {

// ensure-lab {gen-data, train, eval, verify} [flags]. Returns the process
// exit code: 0 success, 1 runtime or verification failure, 2 usage error.
auto run_cli(int argc, char const *const *argv) -> int;
auto run_cli(std::vector<std::string> const &args) -> int; // args exclude the program name

} // namespace ensure
