#include <iostream>

#include "oeprop/cli.hpp"

int main(int argc, char** argv) { return oeprop::cli::run(argc, argv, std::cout, std::cerr); }
