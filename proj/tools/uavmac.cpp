#include <iostream>
#include <string>
#include <vector>

#include "uavmac/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uavmac::cli::run_cli(args, std::cout, std::cerr);
}
