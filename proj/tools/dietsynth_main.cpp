#include <string>
#include <vector>

#include "dietsynth/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dietsynth::run_cli(args);
}
