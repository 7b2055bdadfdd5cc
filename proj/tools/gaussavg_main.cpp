#include <string>
#include <vector>

#include "gaussavg/cli.hpp"

int main(int argc, char** argv) {
    return gaussavg::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc));
}
