#include <string>
#include <vector>

#include "supmmd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return supmmd::run_command(args);
}
