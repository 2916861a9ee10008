#include <iostream>

#include "pacwelfare_cli/cli.hpp"

int main(int argc, char** argv) {
  return pacwelfare::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
