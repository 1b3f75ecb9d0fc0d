#include <iostream>
#include <string>
#include <vector>

#include "dynmix/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return dynmix::cli::run(args, std::cout, std::cerr);
}
