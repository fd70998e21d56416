#pragma once

#include <string>

#include "cpld/config.hpp"

namespace cpld::cli {

// Exit codes: 0 success, 1 check failure, 2 usage error, 3 numeric error.
int cmd_rate(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_estimate(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg, const std::string& exe_path);

}  // namespace cpld::cli
