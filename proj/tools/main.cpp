#include <iostream>
#include <string>
#include <vector>

#include "boon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return boon::cli::run(args, std::cout, std::cerr);
}
