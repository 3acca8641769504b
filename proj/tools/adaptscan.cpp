#include "adaptscan/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return adaptscan::cli::run(std::move(args), std::cout, std::cerr);
}
