#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return egospeed::cli::run(argc, argv, std::cout, std::cerr); }
