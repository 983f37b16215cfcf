#include <iostream>

#include "algebroid/cli.hpp"

int main(int argc, char** argv) {
  return algebroid::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
