#include <iostream>

#include "rxprobe/cli/app.hpp"

int main(int argc, char** argv) {
  return rxprobe::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
