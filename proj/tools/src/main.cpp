#include <iostream>

#include "ctxsim/cli.hpp"

int main(int argc, char** argv) {
  return ctxsim::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
