#include "cpld/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "cpld/errors.hpp"

namespace cpld {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& token) {
    if (token.empty()) throw usage_error("expected a number, got an empty token");
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + token.size())
        throw usage_error("invalid number: '" + token + "'");
    return v;
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw usage_error("grid must be start:stop:step, got '" + spec + "'");
    const double start = parse_double(spec.substr(0, c1));
    const double stop = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_double(spec.substr(c2 + 1));
    if (!(std::isfinite(start) && start >= 0.0))
        throw usage_error("grid start must be >= 0: '" + spec + "'");
    if (!(std::isfinite(step) && step > 0.0))
        throw usage_error("grid step must be > 0: '" + spec + "'");
    if (!(std::isfinite(stop) && stop >= start))
        throw usage_error("grid stop must be >= start: '" + spec + "'");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

std::string RunConfig::to_config_text() const {
    std::ostringstream text;
    text << "command=" << command << '\n';
    text << "dist=" << dist << '\n';
    text << "rate=" << fmt17(rate) << '\n';
    text << "u-grid=" << u_grid << '\n';
    text << "discrete=" << (discrete ? "true" : "false") << '\n';
    text << "closed-form=" << (closed_form ? "true" : "false") << '\n';
    text << "method=" << method << '\n';
    text << "u=" << fmt17(u) << '\n';
    text << "delta=" << fmt17(delta) << '\n';
    text << "t=" << fmt17(t) << '\n';
    text << "paths=" << paths << '\n';
    text << "j=" << fmt17(threshold) << '\n';
    if (lambda.has_value()) text << "lambda=" << fmt17(*lambda) << '\n';
    text << "seed=" << seed << '\n';
    text << "workers=" << workers << '\n';
    if (!out.empty()) text << "out=" << out << '\n';
    if (!format.empty()) text << "format=" << format << '\n';
    if (!criteria.empty()) text << "criteria=" << criteria << '\n';
    return text.str();
}

RunConfig RunConfig::from_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const auto eq = line.find('=', begin);
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(line_no) +
                              " is not key=value: '" + line + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(begin, eq - begin));
        const std::string value = trim(line.substr(eq + 1));
        auto as_bool = [&](const std::string& v) {
            if (v == "true" || v == "1") return true;
            if (v == "false" || v == "0") return false;
            throw usage_error("config key '" + key + "' expects a boolean, got '" + v + "'");
        };
        if (key == "command") cfg.command = value;
        else if (key == "dist") cfg.dist = value;
        else if (key == "rate") cfg.rate = parse_double(value);
        else if (key == "u-grid") cfg.u_grid = value;
        else if (key == "discrete") cfg.discrete = as_bool(value);
        else if (key == "closed-form") cfg.closed_form = as_bool(value);
        else if (key == "method") cfg.method = value;
        else if (key == "u") cfg.u = parse_double(value);
        else if (key == "delta") cfg.delta = parse_double(value);
        else if (key == "t") cfg.t = parse_double(value);
        else if (key == "paths") cfg.paths = static_cast<std::int64_t>(parse_double(value));
        else if (key == "j") cfg.threshold = parse_double(value);
        else if (key == "lambda") cfg.lambda = parse_double(value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(value));
        else if (key == "workers") cfg.workers = static_cast<int>(parse_double(value));
        else if (key == "out") cfg.out = value;
        else if (key == "format") cfg.format = value;
        else if (key == "criteria") cfg.criteria = value;
        else throw usage_error("unknown config key '" + key + "'");
    }
    return cfg;
}

}  // namespace cpld
