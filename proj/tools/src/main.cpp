#include <iostream>

#include "bpinn/cli.hpp"

int main(int argc, char** argv) { return bpinn::cli::run(argc, argv, std::cout, std::cerr); }
