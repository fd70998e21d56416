#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "cpld/errors.hpp"
#include "cpld/estimate.hpp"
#include "cpld/rate.hpp"
#include "cpld/validation.hpp"

namespace cpld::cli {

namespace {

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot open output file: " + path);
    fn(out);
}

std::string resolve_format(const std::string& format, const char* command_default) {
    const std::string resolved = format.empty() ? command_default : format;
    if (resolved != "csv" && resolved != "json")
        throw usage_error("format must be csv or json, got '" + resolved + "'");
    return resolved;
}

std::string json_number_or_null(double x) {
    return std::isfinite(x) ? fmt17(x) : "null";
}

}  // namespace

int cmd_rate(const RunConfig& cfg) {
    const std::string format = resolve_format(cfg.format, "csv");
    const std::vector<double> grid = parse_grid(cfg.u_grid);
    const MarkDistribution dist = MarkDistribution::from_spec(cfg.dist);

    double oracle_mean = 1.0;
    if (cfg.closed_form) {
        if (dist.family() != MarkFamily::Exponential)
            throw usage_error("--closed-form applies to exponential marks (--dist exp:<mean>)");
        oracle_mean = std::get<ExponentialMarks>(dist.law()).mean;
    }

    std::vector<RateFunctionResult> rows;
    rows.reserve(grid.size());
    if (cfg.discrete) {
        for (double u : grid) rows.push_back(rate_function_discrete(dist, u));
    } else {
        const CompoundPoissonModel model(cfg.rate, dist);
        for (double u : grid) rows.push_back(rate_function(model, u));
    }

    auto oracle_at = [&](double u) {
        return cfg.discrete ? closed_form_rate_exp_discrete(u / oracle_mean)
                            : closed_form_rate_exp_continuous(cfg.rate, u / oracle_mean);
    };

    with_output(cfg.out, [&](std::ostream& out) {
        if (format == "csv") {
            out << "u,I,lambda_star,branch";
            if (cfg.closed_form) out << ",closed_form";
            out << '\n';
            for (const RateFunctionResult& row : rows) {
                out << fmt17(row.u) << ',' << fmt17(row.value) << ',';
                if (row.lambda_star.has_value()) out << fmt17(*row.lambda_star);
                out << ',' << to_string(row.branch);
                if (cfg.closed_form) out << ',' << fmt17(oracle_at(row.u));
                out << '\n';
            }
        } else {
            out << "[";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const RateFunctionResult& row = rows[i];
                out << (i == 0 ? "" : ",") << "\n{\"u\":" << fmt17(row.u)
                    << ",\"I\":" << json_number_or_null(row.value) << ",\"lambda_star\":"
                    << (row.lambda_star.has_value() ? fmt17(*row.lambda_star) : "null")
                    << ",\"branch\":\"" << to_string(row.branch) << '"';
                if (cfg.closed_form)
                    out << ",\"closed_form\":" << json_number_or_null(oracle_at(row.u));
                out << '}';
            }
            out << "\n]\n";
        }
    });
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    if (resolve_format(cfg.format, "csv") != "csv")
        throw usage_error("simulate writes csv dumps only (--format csv)");
    const CompoundPoissonModel model(cfg.rate, MarkDistribution::from_spec(cfg.dist));
    const std::vector<PathSample> paths =
        simulate_paths(model, cfg.t, cfg.paths, cfg.seed, cfg.workers);

    double total_s = 0.0;
    double total_jumps = 0.0;
    for (const PathSample& p : paths) {
        total_s += p.s_t();
        total_jumps += static_cast<double>(p.jump_count());
    }
    const double n = paths.empty() ? 1.0 : static_cast<double>(paths.size());

    with_output(cfg.out, [&](std::ostream& out) {
        write_paths_csv_header(out);
        for (std::size_t i = 0; i < paths.size(); ++i)
            write_path_csv(out, static_cast<std::int64_t>(i), paths[i]);
    });
    std::cerr << "paths=" << paths.size() << " mean_s_t=" << fmt17(total_s / n)
              << " mean_jump_count=" << fmt17(total_jumps / n) << '\n';
    return 0;
}

int cmd_estimate(const RunConfig& cfg) {
    const std::string format = resolve_format(cfg.format, "json");
    const CompoundPoissonModel model(cfg.rate, MarkDistribution::from_spec(cfg.dist));

    std::string json;
    std::string csv_header, csv_row;
    if (cfg.method == "mc" || cfg.method == "is" || cfg.method == "zero") {
        EstimateResult result;
        std::optional<double> u, delta;
        std::optional<std::uint64_t> seed;
        if (cfg.method == "zero") {
            result = zero_probability(model, cfg.t);
            u = 0.0;
        } else {
            const EventWindow window{cfg.u, cfg.delta};
            result = cfg.method == "mc"
                         ? mc_probability(model, window, cfg.t, cfg.paths, cfg.seed, cfg.workers)
                         : is_probability(model, window, cfg.t, cfg.paths, cfg.seed, cfg.workers);
            u = cfg.u;
            delta = cfg.delta;
            seed = cfg.seed;
        }
        json = to_json_record(result, u, delta, seed);
        std::ostringstream row;
        row << to_string(result.method) << ',' << (u ? fmt17(*u) : "") << ','
            << (delta ? fmt17(*delta) : "") << ',' << fmt17(result.t) << ',' << result.n_paths
            << ',' << (seed ? std::to_string(*seed) : "") << ',' << fmt17(result.p_hat) << ','
            << fmt17(result.std_err) << ','
            << (result.log_decay ? fmt17(*result.log_decay) : "");
        csv_header = "method,u,delta,t,n,seed,p_hat,std_err,log_decay";
        csv_row = row.str();
    } else if (cfg.method == "chernoff") {
        const double bound = chernoff_tail_bound(model, cfg.threshold, cfg.t, cfg.lambda);
        std::ostringstream js, row;
        js << "{\"method\":\"chernoff\",\"j\":" << fmt17(cfg.threshold)
           << ",\"t\":" << fmt17(cfg.t);
        if (cfg.lambda) js << ",\"lambda\":" << fmt17(*cfg.lambda);
        js << ",\"bound\":" << fmt17(bound) << '}';
        json = js.str();
        row << "chernoff," << fmt17(cfg.threshold) << ',' << fmt17(cfg.t) << ','
            << (cfg.lambda ? fmt17(*cfg.lambda) : "") << ',' << fmt17(bound);
        csv_header = "method,j,t,lambda,bound";
        csv_row = row.str();
    } else if (cfg.method == "laplace") {
        if (!cfg.lambda.has_value())
            throw usage_error("estimate --method laplace requires --lambda");
        const LaplaceEstimate est =
            empirical_laplace(model, *cfg.lambda, cfg.t, cfg.paths, cfg.seed, cfg.workers);
        std::ostringstream js, row;
        js << "{\"method\":\"laplace\",\"lambda\":" << fmt17(*cfg.lambda)
           << ",\"t\":" << fmt17(cfg.t) << ",\"n\":" << est.n_paths << ",\"seed\":" << cfg.seed
           << ",\"mean\":" << fmt17(est.mean) << ",\"std_err\":" << fmt17(est.std_err) << '}';
        json = js.str();
        row << "laplace," << fmt17(*cfg.lambda) << ',' << fmt17(cfg.t) << ',' << est.n_paths
            << ',' << cfg.seed << ',' << fmt17(est.mean) << ',' << fmt17(est.std_err);
        csv_header = "method,lambda,t,n,seed,mean,std_err";
        csv_row = row.str();
    } else {
        throw usage_error("unknown estimate method '" + cfg.method +
                          "', expected mc|is|zero|chernoff|laplace");
    }

    with_output(cfg.out, [&](std::ostream& out) {
        if (format == "json")
            out << json << '\n';
        else
            out << csv_header << '\n' << csv_row << '\n';
    });
    return 0;
}

int cmd_validate(const RunConfig& cfg, const std::string& exe_path) {
    std::vector<int> criteria;
    if (!cfg.criteria.empty()) {
        std::istringstream in(cfg.criteria);
        std::string token;
        while (std::getline(in, token, ','))
            criteria.push_back(static_cast<int>(parse_double(token)));
    }
    ValidationOptions options;
    options.cli_path = exe_path;
    options.workers = cfg.workers;
    const std::vector<CheckResult> checks =
        run_acceptance(options, criteria, cfg.out.empty() ? nullptr : &std::cerr);
    with_output(cfg.out, [&](std::ostream& out) { print_report(out, checks); });
    return all_passed(checks) ? 0 : 1;
}

}  // namespace cpld::cli
