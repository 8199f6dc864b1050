#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const int code = sctree::cli::run_cli(args, std::cout, std::cerr);
  std::cout.flush();
  return code;
}
