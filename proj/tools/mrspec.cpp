#include <iostream>

#include "mrspec/cli.hpp"

int main(int argc, char** argv) { return mrspec::cli::run(argc, argv, std::cout, std::cerr); }
