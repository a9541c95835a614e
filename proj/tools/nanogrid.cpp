#include <iostream>

#include "nanogrid/cli.hpp"

int main(int argc, char** argv) { return nanogrid::cli::run(argc, argv, std::cout, std::cerr); }
