#include "gtsne/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return gtsne::run_cli(argc, argv, std::cout, std::cerr);
}
