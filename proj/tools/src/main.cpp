#include <iostream>

#include "cococat_cli/app.hpp"

int main(int argc, char** argv) { return cococat::cli::run(argc, argv, std::cout, std::cerr); }
