#include <iostream>
#include <string>
#include <vector>

#include "ptmsa/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return ptmsa::execute(args, std::cout, std::cerr);
}
