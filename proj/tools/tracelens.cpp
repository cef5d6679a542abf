#include <iostream>

#include "tracelens/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return tracelens::cli::run_cli(argc, argv, std::cout, std::cerr);
}
