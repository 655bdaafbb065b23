#include <iostream>

#include "hlweave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hlweave::cli::main(args, std::cout, std::cerr);
}
