#include <iostream>
#include <string>
#include <vector>

#include "opseq/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return opseq::cli::run_cli(args, std::cout, std::cerr);
}
