#include <iostream>

#include "pencil/cli.hpp"

int main(int argc, char** argv) {
  return pencil::cli::main_entry(argc, argv, std::cout, std::cerr);
}
