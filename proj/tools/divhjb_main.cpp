#include <iostream>
#include <string>
#include <vector>

#include "divhjb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return divhjb::run(args, std::cout, std::cerr);
}
