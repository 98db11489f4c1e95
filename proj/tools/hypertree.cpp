#include <iostream>

#include "hypertree/cli.hpp"

int main(int argc, char** argv) { return hypertree::cli::run(argc, argv, std::cout, std::cerr); }
