#include <iostream>
#include <string>
#include <vector>

#include "depthsamp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return depthsamp::run_cli(args, std::cout, std::cerr);
}
