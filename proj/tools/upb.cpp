#include <iostream>

#include "upb/config.hpp"

int main(int argc, char** argv) { return upb::cli::main(argc, argv, std::cout, std::cerr); }
