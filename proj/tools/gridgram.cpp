#include <iostream>
#include <string>
#include <vector>

#include "gridgram/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gridgram::run_cli(args, std::cout, std::cerr);
}
