#include "tcellsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return tcellsim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
