#include <iostream>

#include "gaussot/cli.hpp"

int main(int argc, char** argv) { return gaussot::cli::run_cli(argc, argv, std::cout, std::cerr); }
