#include <iostream>

#include "dcoflow/cli.hpp"

int main(int argc, char** argv) { return dcoflow::cli::run(argc, argv, std::cout, std::cerr); }
