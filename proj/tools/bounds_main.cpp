#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return posebounds::cli::main_entry(argc, argv, std::cerr);
}
