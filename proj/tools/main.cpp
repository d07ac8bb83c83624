#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return cat0::cli::run(argc, argv, std::cout, std::cerr); }
