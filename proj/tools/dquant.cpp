#include <iostream>
#include <string>
#include <vector>

#include "dquant/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dquant::run_cli(args, std::cout, std::cerr);
}
