#include <iostream>

#include "exset_cli/cli.hpp"

int main(int argc, char** argv) { return exset::cli::run_cli(argc, argv, std::cout, std::cerr); }
