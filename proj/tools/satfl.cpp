#include <iostream>

#include "satfl/cli.hpp"

int main(int argc, char** argv) { return satfl::cli::run_cli(argc, argv, std::cout, std::cerr); }
