#include <iostream>

#include "sheetflow/cli.hpp"

int main(int argc, char** argv) {
  return sheetflow::cli::dispatch(argc, argv, std::cout, std::cerr);
}
