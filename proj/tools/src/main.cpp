#include "grassclust/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return grassclust::run_cli(argc, argv, std::cout, std::cerr); }
