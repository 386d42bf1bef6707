#include "hcif/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return hcif::run_cli(std::vector<std::string>(argv, argv + argc), std::cin, std::cout, std::cerr);
}
