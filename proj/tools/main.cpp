#include <iostream>
#include <string>
#include <vector>

#include "gboson/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gboson::cli::run(args, std::cout, std::cerr);
}
