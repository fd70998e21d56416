#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpld {

struct CheckResult {
    std::string criterion;  // "1".."9"
    std::string name;
    bool pass = false;
    double observed = 0.0;
    std::string requirement;  // human-readable target, e.g. "<= 1e-08"
    std::string detail;
};

struct ValidationOptions {
    // Path to the CLI binary; needed by the determinism criterion. Empty
    // disables it with an explicit failure line.
    std::string cli_path;
    int workers = 0;  // 0 = hardware
};

// Runs the acceptance checks (all of them when `criteria` is empty) at fixed
// internal seeds. Deterministic for a given build.
std::vector<CheckResult> run_acceptance(const ValidationOptions& options,
                                        const std::vector<int>& criteria = {},
                                        std::ostream* progress = nullptr);

void print_report(std::ostream& out, const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace cpld
