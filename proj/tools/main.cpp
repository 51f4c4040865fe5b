#include <iostream>

#include "rtlxv/cli/cli.hpp"

int main(int argc, char** argv) {
    return rtlxv::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
