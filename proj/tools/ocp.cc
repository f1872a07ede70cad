#include <iostream>

#include "ocp/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ocp::cli::run(args, std::cout, std::cerr);
}
