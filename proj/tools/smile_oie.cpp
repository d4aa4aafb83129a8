#include <iostream>

#include "smile/cli.hpp"

int main(int argc, char** argv) { return smile::run_cli(argc, argv, std::cout, std::cerr); }
