#include <iostream>

#include "lowcoll/cli/cli.hpp"

int main(int argc, char** argv) {
  return lowcoll::cli::run(argc, argv, std::cout, std::cerr);
}
