#include <iostream>

#include "tcr/cli.hpp"

int main(int argc, char** argv) {
    return tcr::run_command(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
