#include <iostream>

#include "tmach/cli.h"

int main(int argc, char** argv) { return tmach::cli::run(argc, argv, std::cout, std::cerr); }
