#include "diskgeo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return diskgeo::cli::run(argc, argv, std::cout, std::cerr); }
