#include "varmin/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return varmin::cli::run(argc, argv, std::cout, std::cerr); }
