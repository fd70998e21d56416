#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpld {

// Decimal with 17 significant digits: lossless round trip for binary64.
std::string fmt17(double x);

// Parses a full double, including "inf"/"nan"; usage_error on junk.
double parse_double(const std::string& token);

// "start:stop:step" with start >= 0, step > 0, stop >= start; inclusive of
// both endpoints (within half a step).
std::vector<double> parse_grid(const std::string& spec);

// Resolved command configuration. Defaults match the CLI: seed 0, csv output
// to stdout. Round-trips through the flat key=value config format.
struct RunConfig {
    std::string command;  // rate | simulate | estimate | validate
    std::string dist = "exp:1";
    double rate = 1.0;
    std::string u_grid = "0:4:0.05";
    bool discrete = false;
    bool closed_form = false;
    std::string method = "mc";
    double u = 1.0;
    double delta = 0.1;
    double t = 1.0;
    std::int64_t paths = 10000;
    double threshold = 1.0;  // j for the chernoff method
    std::optional<double> lambda;  // tilt for chernoff, exponent for laplace
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware
    std::string out;  // empty = stdout
    std::string format;  // empty = command default (csv; estimate: json)
    std::string criteria;  // validate: comma-separated subset, empty = all

    std::string to_config_text() const;
    static RunConfig from_config_text(const std::string& text);

    bool operator==(const RunConfig&) const = default;
};

}  // namespace cpld
