#include <string>
#include <vector>

#include "discspline/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return discspline::run_cli(args);
}
