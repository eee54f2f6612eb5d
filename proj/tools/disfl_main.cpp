#include <iostream>

#include "disfl/cli.hpp"

int main(int argc, char** argv) { return disfl::run_cli(argc, argv, std::cout, std::cerr); }
