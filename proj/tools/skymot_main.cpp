#include <string>
#include <vector>

#include "skymot/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return skymot::run_cli(args);
}
