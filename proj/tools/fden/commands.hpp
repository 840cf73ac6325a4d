#pragma once

#include "config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fden::cli {

struct Assertion {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct Outcome {
    nlohmann::json report;
    std::vector<Assertion> assertions;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand, writes <out_dir>/<command>.{csv,json}, prints a summary.
/// Throws ConfigError or AssertionFailure.
Outcome run(const RunConfig& cfg, std::ostream& summary);

}  // namespace fden::cli
