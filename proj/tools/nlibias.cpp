#include <iostream>
#include <string>
#include <vector>

#include "nlibias/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return nlibias::cli::run(args, std::cout, std::cerr);
}
