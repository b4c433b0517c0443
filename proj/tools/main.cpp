#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) {
    return whmc::cli::main_with_args(argc, argv, std::cout, std::cerr);
}
