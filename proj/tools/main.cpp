#include <iostream>
#include <string>
#include <vector>

#include "neuroevo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return neuroevo::run(args, std::cout, std::cerr);
}
