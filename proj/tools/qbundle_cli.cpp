#include <iostream>

#include "qbundle/cli.hpp"

int main(int argc, char** argv) { return qbundle::cli::run(argc, argv, std::cout, std::cerr); }
