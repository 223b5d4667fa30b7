#include <iostream>
#include <string>
#include <vector>

#include "ibp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return ibp::run_cli(args, std::cout, std::cerr);
}
