#include <iostream>
#include <string>
#include <vector>

#include "deepcomm/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return deepcomm::cli::run(args, std::cout, std::cerr);
}
