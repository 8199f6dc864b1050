#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sctree::cli {

// Parses argv (without the program name) and runs one subcommand. Returns the process exit
// code: 0 ok, 1 configuration error, 2 partial failure, 3 gateway/protocol failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sctree::cli
