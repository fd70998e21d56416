#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpld/config.hpp"

namespace {

std::string cli_path() {
    const char* path = std::getenv("CPLD_CLI");
    REQUIRE_MESSAGE(path != nullptr, "CPLD_CLI must point at the cpld binary");
    return path;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, bool capture_stderr = false) {
    const std::string cmd = "'" + cli_path() + "' " + args +
                            (capture_stderr ? " 2>&1 1>/dev/null" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) out.push_back(token);
    return out;
}

// Rows of a CSV body (header skipped), split into cells.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    const auto lines = split(text, '\n');
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) rows.push_back(split(lines[i] + ",#", ','));  // keep empty tail
    for (auto& row : rows) row.pop_back();
    return rows;
}

double extract_json_number(const std::string& record, const std::string& key) {
    const auto pos = record.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::strtod(record.c_str() + pos + key.size() + 3, nullptr);
}

}  // namespace

TEST_CASE("rate: grid size and the worked values") {
    const RunResult res = run("rate --dist exp:1 --rate 1 --u-grid 0:4:0.05");
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 81);
    CHECK(split(res.output, '\n').front() == "u,I,lambda_star,branch");

    CHECK(std::strtod(rows.front()[0].c_str(), nullptr) == 0.0);
    CHECK(std::strtod(rows.front()[1].c_str(), nullptr) == 1.0);
    CHECK(rows.front()[2].empty());
    CHECK(rows.front()[3] == "zero_atom");

    const auto& last = rows.back();
    CHECK(std::strtod(last[0].c_str(), nullptr) == 4.0);
    CHECK(std::abs(std::strtod(last[1].c_str(), nullptr) - 1.0) <= 1e-6);
    CHECK(std::abs(std::strtod(last[2].c_str(), nullptr) - 0.5) <= 1e-6);
    CHECK(last[3] == "interior");
}

TEST_CASE("rate: single-point grid at the mean") {
    const RunResult res = run("rate --dist exp:1 --rate 1 --u-grid 1:1:1");
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 1);
    CHECK(std::strtod(rows[0][1].c_str(), nullptr) == 0.0);
}

TEST_CASE("rate: discrete branch") {
    const RunResult res = run("rate --discrete --dist exp:1 --u-grid 0.5:3:0.5");
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 6);
    const auto& u2 = rows[3];
    CHECK(std::strtod(u2[0].c_str(), nullptr) == 2.0);
    CHECK(std::abs(std::strtod(u2[1].c_str(), nullptr) - 0.306852819440055) <= 1e-6);
}

TEST_CASE("rate: closed-form oracle column matches") {
    const RunResult res = run("rate --dist exp:1 --rate 2 --u-grid 0:3:0.25 --closed-form");
    CHECK(res.exit_code == 0);
    for (const auto& row : csv_rows(res.output)) {
        const double value = std::strtod(row[1].c_str(), nullptr);
        const double oracle = std::strtod(row[4].c_str(), nullptr);
        CHECK(std::abs(value - oracle) <= 1e-8);
    }
    CHECK(run("rate --dist point:1 --closed-form").exit_code == 2);
}

TEST_CASE("rate: csv numbers round-trip at 17 significant digits") {
    const RunResult res = run("rate --dist gamma:2:0.5 --rate 1.5 --u-grid 0.1:2:0.1");
    for (const auto& row : csv_rows(res.output)) {
        for (std::size_t c : {0u, 1u, 2u}) {
            if (row[c].empty()) continue;
            const double v = std::strtod(row[c].c_str(), nullptr);
            CHECK(cpld::fmt17(v) == row[c]);
        }
    }
}

TEST_CASE("rate: json output") {
    const RunResult res = run("rate --dist exp:1 --rate 1 --u-grid 1:2:1 --format json");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"branch\":\"interior\"") != std::string::npos);
    CHECK(res.output.find("\"u\":2") != std::string::npos);
}

TEST_CASE("simulate: deterministic point-mass dump") {
    const std::string args = "simulate --dist point:1 --rate 1 --t 10 --paths 1 --seed 7";
    const RunResult res = run(args);
    CHECK(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    for (const auto& row : rows) CHECK(std::strtod(row[2].c_str(), nullptr) == 1.0);

    const RunResult again = run(args);
    CHECK(again.output == res.output);  // byte-identical rerun

    const RunResult summary = run(args, true);
    CHECK(summary.output.find("paths=1") != std::string::npos);
    const auto pos = summary.output.find("mean_s_t=");
    REQUIRE(pos != std::string::npos);
    const double mean_s = std::strtod(summary.output.c_str() + pos + 9, nullptr);
    CHECK(mean_s == static_cast<double>(rows.size()) / 10.0);
}

TEST_CASE("simulate: summary statistics within 4 sigma") {
    const RunResult summary =
        run("simulate --dist exp:1 --rate 1 --t 100 --paths 1000 --seed 1 --out /dev/null",
            true);
    CHECK(summary.output.find("paths=1000") != std::string::npos);
    const auto pos = summary.output.find("mean_jump_count=");
    REQUIRE(pos != std::string::npos);
    const double mean_jumps = std::strtod(summary.output.c_str() + pos + 16, nullptr);
    CHECK(std::abs(mean_jumps - 100.0) < 4.0 * std::sqrt(100.0 / 1000.0));
}

TEST_CASE("estimate: exact zero probability record") {
    const RunResult res = run("estimate --method zero --dist exp:1 --rate 1 --t 5");
    CHECK(res.exit_code == 0);
    CHECK(extract_json_number(res.output, "p_hat") == std::exp(-5.0));
    CHECK(extract_json_number(res.output, "std_err") == 0.0);
    CHECK(extract_json_number(res.output, "log_decay") == 1.0);
    CHECK(res.output.find("\"method\":\"exact\"") != std::string::npos);
}

TEST_CASE("estimate: importance sampling log decay") {
    const RunResult res = run(
        "estimate --method is --u 4 --delta 0.1 --t 50 --paths 100000 --dist exp:1 --rate 1 "
        "--seed 3");
    CHECK(res.exit_code == 0);
    const double decay = extract_json_number(res.output, "log_decay");
    CHECK(decay >= 0.90);
    CHECK(decay <= 1.10);
}

TEST_CASE("estimate: certain event and csv format") {
    const RunResult res =
        run("estimate --method mc --u 1 --delta 100 --t 1 --paths 10 --dist exp:1 --rate 1");
    CHECK(res.exit_code == 0);
    CHECK(extract_json_number(res.output, "p_hat") == 1.0);

    const RunResult csv = run(
        "estimate --method mc --u 1 --delta 100 --t 1 --paths 10 --dist exp:1 --rate 1 "
        "--format csv");
    CHECK(csv.output.find("method,u,delta,t,n,seed,p_hat,std_err,log_decay") == 0);
    CHECK(csv.output.find("crude_mc,1,100,1,10,0,1,0,") != std::string::npos);
}

TEST_CASE("estimate: chernoff and laplace records") {
    const RunResult chernoff =
        run("estimate --method chernoff --j 10 --t 1 --lambda 0.5 --dist exp:1 --rate 1");
    CHECK(chernoff.exit_code == 0);
    CHECK(std::abs(extract_json_number(chernoff.output, "bound") - std::exp(-4.0)) <= 1e-12);

    const RunResult laplace = run(
        "estimate --method laplace --lambda 0.3 --t 2 --paths 50000 --dist exp:1 --rate 1 "
        "--seed 2");
    CHECK(laplace.exit_code == 0);
    const double mean = extract_json_number(laplace.output, "mean");
    const double se = extract_json_number(laplace.output, "std_err");
    CHECK(std::abs(mean - std::exp(2.0 * 0.3 / 0.7)) < 4.0 * se);
}

TEST_CASE("config file values are overridden by flags") {
    const std::string path = "cli_test_config.txt";
    {
        std::ofstream out(path);
        out << "method=zero\ndist=exp:1\nrate=1\nt=5\n";
    }
    const RunResult from_config = run("estimate --config " + path);
    CHECK(from_config.exit_code == 0);
    CHECK(extract_json_number(from_config.output, "p_hat") == std::exp(-5.0));

    const RunResult overridden = run("estimate --config " + path + " --t 3");
    CHECK(extract_json_number(overridden.output, "p_hat") == std::exp(-3.0));
    std::remove(path.c_str());
}

TEST_CASE("exit codes: usage and boundary errors") {
    CHECK(run("rate --dist nope:1").exit_code == 2);
    CHECK(run("rate --dist exp:1 --u-grid 4:0:1").exit_code == 2);
    CHECK(run("estimate --method bogus --dist exp:1").exit_code == 2);
    CHECK(run("estimate --method laplace --lambda 0.5 --dist exp:1 --rate 1").exit_code == 2);
    CHECK(run("estimate --method is --u 1 --delta 0.1 --dist zeroinf:1:exp:1 --rate 1")
              .exit_code == 2);
    CHECK(run("simulate --dist exp:1 --t 0 --paths 1").exit_code == 2);
    CHECK(run("nonsense").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("outputs are byte-identical across worker counts") {
    const std::string args =
        "estimate --method is --u 3 --delta 0.2 --t 20 --paths 20000 --dist exp:1 --rate 1 "
        "--seed 9 --workers ";
    const RunResult one = run(args + "1");
    const RunResult eight = run(args + "8");
    CHECK(one.exit_code == 0);
    CHECK(one.output == eight.output);
}

TEST_CASE("validate: subset run reports the closed-form tolerance") {
    const RunResult res = run("validate --criteria 1,2");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("PASS") != std::string::npos);
    CHECK(res.output.find("1e-08") != std::string::npos);
    CHECK(res.output.find("FAIL") == std::string::npos);
}

TEST_CASE("validate: full suite passes") {
    const RunResult res = run("validate");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("FAIL") == std::string::npos);
    CHECK(res.output.find("checks passed") != std::string::npos);
}
