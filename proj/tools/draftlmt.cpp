#include <iostream>
#include <string>
#include <vector>

#include "draftlmt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return draftlmt::run_cli(args, std::cout, std::cerr);
}
