#include <iostream>

#include "rsvm/cli.hpp"

int main(int argc, char** argv) { return rsvm::cli::run(argc, argv, std::cout, std::cerr); }
