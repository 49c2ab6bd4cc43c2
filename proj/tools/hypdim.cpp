#include <iostream>

#include "hypdim/cli.hpp"

int main(int argc, char** argv) {
  return hypdim::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
