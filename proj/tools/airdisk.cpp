#include <iostream>

#include "airdisk_cli.hpp"

int main(int argc, char** argv) { return airdisk::cli::run_cli(argc, argv, std::cout, std::cerr); }
