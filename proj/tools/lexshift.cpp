#include <iostream>
#include <string>
#include <vector>

#include "lexshift/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lexshift::run_cli(args, std::cout, std::cerr);
}
