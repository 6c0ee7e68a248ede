#include "tti/cli/commands.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    return tti::cli::run_command(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
