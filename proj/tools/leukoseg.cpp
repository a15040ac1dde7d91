#include <iostream>

#include "leukoseg/cli.hpp"

int main(int argc, char** argv) { return leukoseg::cli::run(argc, argv, std::cout, std::cerr); }
