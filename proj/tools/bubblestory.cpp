#include <iostream>

#include "bubblestory/cli.hpp"

int main(int argc, char** argv) {
  return bubblestory::cli::run(argc, argv, std::cout, std::cerr);
}
