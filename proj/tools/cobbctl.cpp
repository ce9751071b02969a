#include <iostream>

#include "cobb/cli.hpp"

int main(int argc, char** argv) { return cobb::cli::run(argc, argv, std::cout, std::cerr); }
