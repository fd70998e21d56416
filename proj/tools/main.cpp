#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "cpld/errors.hpp"

namespace {

// Config files are flat key=value text applied before flag parsing, so the
// precedence is command-line flags > config file > built-in defaults.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cpld::usage_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    cpld::RunConfig cfg;
    std::string config_path;
    double lambda_opt = 0.0;

    try {
        config_path = find_config_path(argc, argv);
        if (!config_path.empty())
            cfg = cpld::RunConfig::from_config_text(read_text_file(config_path));
    } catch (const cpld::usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"rate functions, simulation and rare-event estimation for nonnegative "
                 "compound Poisson processes"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--seed", cfg.seed, "random seed (default 0)");
        sub->add_option("--workers", cfg.workers, "worker threads, 0 = hardware");
        sub->add_option("--out", cfg.out, "output file (default stdout)");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--dist", cfg.dist,
                        "mark distribution: exp:<mean> | gamma:<shape>:<scale> | point:<c> | "
                        "zeroinf:<p0>:<spec> | emp:<path>");
        sub->add_option("--rate", cfg.rate, "jump intensity r > 0");
    };

    CLI::App* rate = app.add_subcommand("rate", "tabulate the rate function I(u)");
    add_model(rate);
    add_common(rate);
    rate->add_option("--u-grid", cfg.u_grid, "evaluation grid start:stop:step");
    rate->add_flag("--discrete", cfg.discrete, "i.i.d. mean rate function instead");
    rate->add_flag("--closed-form", cfg.closed_form,
                   "append the exponential-marks closed form as an oracle column");
    rate->add_option("--format", cfg.format, "csv | json");

    CLI::App* simulate = app.add_subcommand("simulate", "dump marked point process paths");
    add_model(simulate);
    add_common(simulate);
    simulate->add_option("--t", cfg.t, "horizon t > 0");
    simulate->add_option("--paths", cfg.paths, "number of paths");

    CLI::App* estimate = app.add_subcommand("estimate", "rare-event probability estimators");
    add_model(estimate);
    add_common(estimate);
    estimate->add_option("--method", cfg.method, "mc | is | zero | chernoff | laplace");
    estimate->add_option("--u", cfg.u, "window center");
    estimate->add_option("--delta", cfg.delta, "window half-width");
    estimate->add_option("--t", cfg.t, "horizon t > 0");
    estimate->add_option("--paths", cfg.paths, "number of paths");
    estimate->add_option("--j", cfg.threshold, "tail level for --method chernoff");
    estimate->add_option("--lambda", lambda_opt,
                         "tilt (chernoff) or transform exponent (laplace)");
    estimate->add_option("--format", cfg.format, "csv | json");

    CLI::App* validate = app.add_subcommand("validate", "run the built-in validation suite");
    add_common(validate);
    validate->add_option("--criteria", cfg.criteria,
                         "comma-separated criterion subset, e.g. 1,2,8 (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (estimate->parsed() && estimate->count("--lambda") > 0) cfg.lambda = lambda_opt;

    try {
        if (rate->parsed()) {
            cfg.command = "rate";
            return cpld::cli::cmd_rate(cfg);
        }
        if (simulate->parsed()) {
            cfg.command = "simulate";
            return cpld::cli::cmd_simulate(cfg);
        }
        if (estimate->parsed()) {
            cfg.command = "estimate";
            return cpld::cli::cmd_estimate(cfg);
        }
        cfg.command = "validate";
        return cpld::cli::cmd_validate(cfg, argv[0]);
    } catch (const cpld::usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const cpld::divergence_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const cpld::boundary_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const cpld::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
