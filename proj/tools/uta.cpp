#include <iostream>
#include <string>
#include <vector>

#include "uta_cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return uta::cli::cli_main(args, std::cout, std::cerr);
}
