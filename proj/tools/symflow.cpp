#include <iostream>

#include "symflow/cli.hpp"

int main(int argc, char** argv) {
  return symflow::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
