#include "ionweave/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return ionweave::run_cli(argc, argv, std::cout, std::cerr); }
