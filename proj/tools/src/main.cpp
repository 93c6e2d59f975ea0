#include <string>
#include <vector>

#include "shearmix_cli/run.hpp"

int main(int argc, char** argv) {
    return shearmix::cli::main(std::vector<std::string>(argv, argv + argc));
}
