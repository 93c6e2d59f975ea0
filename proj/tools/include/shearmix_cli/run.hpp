#pragma once

#include <string>
#include <vector>

#include "shearmix_cli/config.hpp"

namespace shearmix::cli {

enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kConfigError = 2,
    kIntegrityError = 3,
    kNonFinding = 4,
};

/// Run one subcommand, writing <out>/<subcommand>.json and .csv.
int run(const RunConfig& config);

/// Full command-line entry point (argument parsing included).
int main(const std::vector<std::string>& args);

}  // namespace shearmix::cli
