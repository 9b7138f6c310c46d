#include <iostream>

#include "liesym/cli.hpp"

int main(int argc, char** argv) { return liesym::cli::run(argc, argv, std::cout, std::cerr); }
