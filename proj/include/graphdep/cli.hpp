#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace graphdep {

/// Entry point shared by the binary and the CLI tests. `args` excludes the
/// program name. Returns a process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace graphdep
