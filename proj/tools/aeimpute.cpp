#include <iostream>

#include "aeimpute/commands.hpp"

int main(int argc, char** argv) {
    return aeimpute::commands::run_cli(argc, argv, std::cout, std::cerr);
}
