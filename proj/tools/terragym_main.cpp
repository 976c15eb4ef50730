#include <iostream>
#include <string>
#include <vector>

#include "terragym/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return terragym::cli::run(std::move(args), std::cout, std::cerr);
}
