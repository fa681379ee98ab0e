#include <iostream>

#include "batchsel/commands.hpp"

int main(int argc, char** argv) {
  return batchsel::cli::run_cli(argc, argv, std::cout, std::cerr);
}
