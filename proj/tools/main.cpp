#include <iostream>

#include "mdrscreen/cli.hpp"

int main(int argc, char** argv) { return mdr::cli_main(argc, argv, std::cout, std::cerr); }
