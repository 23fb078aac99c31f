#include <iostream>

#include "wopkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wopkit::run_cli(args, std::cout, std::cerr);
}
