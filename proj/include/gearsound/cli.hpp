#pragma once

#include <string>
#include <vector>

namespace gearsound {

// Entry point behind the command-line binary; exposed so tests can invoke
// subcommands in-process. Returns 0 on success, 1 on usage errors, 2 on
// data errors (missing or inconsistent inputs).
int run_command(const std::vector<std::string>& args);

}  // namespace gearsound
