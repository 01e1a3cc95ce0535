#include <iostream>

#include "hefs/cli.hpp"

int main(int argc, char** argv) {
    return hefs::run_cli(argc, argv, std::cout, std::cerr);
}
