#include <iostream>

#include "mininfo/cli.hpp"

int main(int argc, char** argv) { return mininfo::run_cli(argc, argv, std::cout, std::cerr); }
