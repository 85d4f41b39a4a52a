#include <iostream>

#include "umbilic/cli.hpp"

int main(int argc, char** argv) {
    return umb::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
