#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return dgame::cli::run(argc, argv, std::cout, std::cerr); }
