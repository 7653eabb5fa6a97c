#include <iostream>
#include <string>
#include <vector>

#include "climbtrace/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return climbtrace::run_cli(args, std::cout, std::cerr);
}
