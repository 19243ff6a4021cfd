#include <iostream>
#include <string>
#include <vector>

#include "commands.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return stratshap::cli::run(args, std::cout, std::cerr);
}
