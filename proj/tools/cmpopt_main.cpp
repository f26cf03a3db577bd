#include <iostream>

#include "cmpopt/cli.hpp"

int main(int argc, char** argv) { return cmpopt::run_cli(argc, argv, std::cout, std::cerr); }
