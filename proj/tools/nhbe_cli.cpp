#include <iostream>

#include "nhbe/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return nhbe::cli::run(args, std::cout, std::cerr);
}
