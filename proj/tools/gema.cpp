#include <iostream>

#include "gema/cli/commands.hpp"

int main(int argc, char** argv) { return gema::cli::run(argc, argv, std::cout, std::cerr); }
