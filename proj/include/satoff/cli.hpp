#pragma once

#include <string>
#include <vector>

namespace satoff {

// Full command-line surface: subcommands train, evaluate, sweep, oracle.
// Returns the process exit status (0 ok, 2 missing scenario file, 1 other
// failures). The vector overload prepends a program name for tests.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace satoff
