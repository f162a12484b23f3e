#include <iostream>

#include "iotc/cli.hpp"

int main(int argc, char** argv) {
  return iotc::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                       std::cerr);
}
