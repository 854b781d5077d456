#include <iostream>

#include "ifsg/cli.hpp"

int main(int argc, char** argv) { return ifsg::run_cli(argc, argv, std::cout, std::cerr); }
