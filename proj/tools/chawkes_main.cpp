#include <iostream>

#include "chawkes/cli.hpp"

int main(int argc, char** argv) { return chawkes::run_cli(argc, argv, std::cout, std::cerr); }
