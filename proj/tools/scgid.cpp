#include <iostream>

#include "scgid/cli.hpp"

int main(int argc, char** argv) {
    return scgid::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
