#include <iostream>

#include "dgiga/cli.hpp"

int main(int argc, char** argv) { return dgiga::run_cli(argc, argv, std::cout, std::cerr); }
