#include <iostream>
#include <string>
#include <vector>

#include "lfc3d/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lfc3d::cli::dispatch(args, std::cout, std::cerr);
}
