#include <iostream>

#include "mobiq/cli.hpp"

int main(int argc, char** argv) { return mobiq::run_cli(argc, argv, std::cout, std::cerr); }
